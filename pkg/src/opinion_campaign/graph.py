"""Weighted social graphs and the augmented absorbing-walk system.

Graphs are stored as a CSR weight matrix ``W`` where ``W[i, j] = w_ij`` is the
weight of the edge from ``i`` to ``j``.  For undirected graphs the matrix is
symmetric.  The expressed opinion of node ``i`` averages over the row ``i``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input."""


@dataclass(frozen=True, eq=False)
class SocialGraph:
    """Immutable weighted graph with dense node ids ``0..n-1``.

    Attributes
    ----------
    weights : scipy.sparse.csr_array
        ``n x n`` non-negative weight matrix without diagonal entries.
    directed : bool
    labels : tuple of str
        External label of every node id.
    """

    weights: sp.csr_array
    directed: bool = False
    labels: tuple[str, ...] = ()
    weighted_degree: np.ndarray = field(init=False, repr=False)
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        W = sp.csr_array(self.weights, dtype=float)
        W.sum_duplicates()
        W.eliminate_zeros()
        W.sort_indices()
        n = W.shape[0]
        if W.shape != (n, n):
            raise ValueError(f"weight matrix must be square, got {W.shape}")
        if W.nnz and (not np.all(np.isfinite(W.data)) or W.data.min() < 0):
            raise ValueError("weights must be finite and non-negative")
        if W.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if not self.directed and (W != W.T).nnz:
            raise ValueError("undirected graph needs a symmetric weight matrix")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} nodes")
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != n:
            raise ValueError("node labels must be unique")
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weighted_degree", np.asarray(W.sum(axis=1)).ravel())
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_edges(cls, n, edges, directed=False, labels=None):
        """Build a graph from ``(i, j)`` or ``(i, j, w)`` tuples over ids ``0..n-1``.

        Duplicate pairs have their weights summed.  For undirected graphs each
        tuple contributes one symmetric edge.
        """
        rows, cols, vals = [], [], []
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            rows.append(i)
            cols.append(j)
            vals.append(w)
            if not directed:
                rows.append(j)
                cols.append(i)
                vals.append(w)
        W = sp.coo_array((vals, (rows, cols)), shape=(n, n)).tocsr()
        return cls(W, directed=directed, labels=tuple(labels) if labels else ())

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def num_edges(self) -> int:
        """Stored edges; each undirected edge counts once."""
        nnz = self.weights.nnz
        return nnz if self.directed else nnz // 2

    @property
    def id_map(self) -> dict[str, int]:
        return dict(self._index)

    def node_id(self, label: str) -> int:
        return self._index[label]

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Out-neighbors of ``i`` and the corresponding weights."""
        W = self.weights
        lo, hi = W.indptr[i], W.indptr[i + 1]
        return W.indices[lo:hi], W.data[lo:hi]

    def adjacency(self) -> list[list[tuple[int, float]]]:
        return [list(zip(*(a.tolist() for a in self.neighbors(i)))) for i in range(self.n)]

    def edges(self) -> Iterable[tuple[int, int, float]]:
        """Yield ``(i, j, w)``; undirected edges are yielded once with ``i < j``."""
        coo = self.weights.tocoo()
        for i, j, w in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
            if self.directed or i < j:
                yield i, j, w


def load_edge_list(source, directed: bool = False) -> SocialGraph:
    """Parse a whitespace separated ``src dst [weight]`` edge list.

    ``source`` is the file contents (``str`` or ``bytes``), an open stream, or
    a ``pathlib.Path``.  Lines starting with ``#`` and blank lines are skipped.
    Zero-weight edges are dropped, though their endpoints still become nodes.
    """
    text = read_text(source)
    labels: dict[str, int] = {}
    rows, cols, vals = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"line {lineno}: expected 'src dst [weight]', got {raw!r}")
        src, dst = parts[0], parts[1]
        if src == dst:
            raise GraphFormatError(f"line {lineno}: self-loop at node {src!r}")
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-numeric weight {parts[2]!r}") from None
            if not math.isfinite(w):
                raise GraphFormatError(f"line {lineno}: non-finite weight {parts[2]!r}")
            if w < 0:
                raise GraphFormatError(f"line {lineno}: negative weight {w}")
        i = labels.setdefault(src, len(labels))
        j = labels.setdefault(dst, len(labels))
        if w == 0:
            continue
        rows.append(i)
        cols.append(j)
        vals.append(w)
        if not directed:
            rows.append(j)
            cols.append(i)
            vals.append(w)
    n = len(labels)
    W = sp.coo_array((vals, (rows, cols)), shape=(n, n)).tocsr()
    return SocialGraph(W, directed=directed, labels=tuple(labels))


def write_edge_list(graph: SocialGraph, stream: TextIO) -> None:
    for i, j, w in graph.edges():
        stream.write(f"{graph.labels[i]} {graph.labels[j]} {w!r}\n")


def dumps_edge_list(graph: SocialGraph) -> str:
    buf = io.StringIO()
    write_edge_list(graph, buf)
    return buf.getvalue()


def write_id_map(graph: SocialGraph, stream: TextIO) -> None:
    stream.write("external_label,node_id\n")
    for i, lab in enumerate(graph.labels):
        stream.write(f"{lab},{i}\n")


def read_text(source) -> str:
    """Contents of ``source``: text, bytes, a stream, or an ``os.PathLike``."""
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    with open(source, encoding="utf-8") as fh:
        return fh.read()


def target_mask(n: int, targets: Iterable[int] | None) -> np.ndarray:
    """Boolean mask of the target set; rejects out-of-range or repeated ids."""
    mask = np.zeros(n, dtype=bool)
    if targets is None:
        return mask
    for t in targets:
        t = int(t)
        if not 0 <= t < n:
            raise IndexError(f"target node {t} out of range [0, {n})")
        if mask[t]:
            raise ValueError(f"target node {t} listed twice")
        mask[t] = True
    return mask


def degree(graph: SocialGraph, i: int) -> float:
    """Weighted in-degree (equal to the weighted degree when undirected)."""
    W = graph.weights
    if not graph.directed:
        return float(graph.weighted_degree[i])
    return float(W[:, [i]].sum())


def in_degrees(graph: SocialGraph) -> np.ndarray:
    if not graph.directed:
        return graph.weighted_degree.copy()
    return np.asarray(graph.weights.sum(axis=0)).ravel()


def free_degree(graph: SocialGraph, i: int, selected: Iterable[int] = ()) -> float:
    """In-degree of ``i`` counting only edges from nodes outside ``selected``."""
    sel = set(int(x) for x in selected)
    if graph.directed:
        col = graph.weights[:, [i]].tocoo()
        nbrs, w = col.row, col.data
    else:
        nbrs, w = graph.neighbors(i)
    return float(sum(wt for j, wt in zip(nbrs.tolist(), w.tolist()) if j not in sel))


@dataclass(frozen=True, eq=False)
class AbsorbingSystem:
    """Transient/absorbing partition of the augmented graph.

    Augmented node ids: ``0..n-1`` are the social nodes and ``n + i`` is the
    absorbing copy of node ``i``.  ``absorbing`` lists all copies first, then
    the targets.  ``P_UU`` and ``P_UB`` are indexed by position in
    ``transient`` and ``absorbing``.
    """

    n: int
    transient: np.ndarray
    absorbing: np.ndarray
    P_UU: sp.csr_array
    P_UB: sp.csr_array
    absorbing_values: np.ndarray

    def copy_of(self, i: int) -> int:
        return self.n + i

    def row(self, u: int) -> dict[int, float]:
        """Transition probabilities of social node ``u`` keyed by augmented id."""
        pos = int(np.searchsorted(self.transient, u))
        if pos >= len(self.transient) or self.transient[pos] != u:
            raise KeyError(f"node {u} is not transient")
        out: dict[int, float] = {}
        for P, ids in ((self.P_UU, self.transient), (self.P_UB, self.absorbing)):
            lo, hi = P.indptr[pos], P.indptr[pos + 1]
            for c, p in zip(P.indices[lo:hi].tolist(), P.data[lo:hi].tolist()):
                out[int(ids[c])] = out.get(int(ids[c]), 0.0) + p
        return out


def build_augmented(graph: SocialGraph, s, targets: Iterable[int] | None = None) -> AbsorbingSystem:
    """Absorbing system of the augmented graph with targets clamped to 1.

    Every node ``i`` gets a unit-weight edge to its absorbing copy valued
    ``s_i``.  Targets become absorbing with value 1.
    """
    n = graph.n
    s = np.asarray(s, dtype=float)
    if s.shape != (n,):
        raise ValueError(f"opinion vector has shape {s.shape}, expected ({n},)")
    mask = target_mask(n, targets)
    tgt = np.flatnonzero(mask)
    U = np.flatnonzero(~mask)
    B = np.concatenate([n + np.arange(n), tgt])
    f_B = np.concatenate([s, np.ones(len(tgt))])

    inv = 1.0 / (1.0 + graph.weighted_degree[U])
    rows = graph.weights[U]
    P_UU = sp.csr_array(sp.diags_array(inv) @ rows[:, U])
    # columns of P_UB: copies (0..n-1) then targets (n..n+|T|-1)
    to_targets = sp.diags_array(inv) @ rows[:, tgt]
    copies = sp.csr_array((inv, (np.arange(len(U)), U)), shape=(len(U), n))
    P_UB = sp.csr_array(sp.hstack([copies, to_targets], format="csr"))
    P_UU.sort_indices()
    P_UB.sort_indices()
    return AbsorbingSystem(n=n, transient=U, absorbing=B, P_UU=P_UU, P_UB=P_UB,
                           absorbing_values=f_B)
