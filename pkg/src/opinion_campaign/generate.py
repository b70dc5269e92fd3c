"""Seeded synthetic graphs and small named fixtures."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graph import SocialGraph


def _from_pairs(n, rows, cols, weights=None, directed=False) -> SocialGraph:
    w = np.ones(len(rows)) if weights is None else np.asarray(weights, dtype=float)
    if not directed:
        rows, cols, w = np.concatenate([rows, cols]), np.concatenate([cols, rows]), np.concatenate([w, w])
    W = sp.coo_array((w, (rows, cols)), shape=(n, n)).tocsr()
    return SocialGraph(W, directed=directed)


def gnm_random_graph(n: int, m: int, seed: int, directed: bool = False) -> SocialGraph:
    """Uniform random graph with exactly ``m`` distinct edges and unit weights."""
    max_m = n * (n - 1) if directed else n * (n - 1) // 2
    if not 0 <= m <= max_m:
        raise ValueError(f"cannot place {m} edges on {n} nodes")
    rng = np.random.default_rng(seed)
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < m:
        need = m - len(keys)
        a = rng.integers(0, n, size=2 * need + 16)
        b = rng.integers(0, n, size=2 * need + 16)
        ok = a != b
        a, b = a[ok], b[ok]
        if not directed:
            a, b = np.minimum(a, b), np.maximum(a, b)
        new = a.astype(np.int64) * n + b
        # keep first occurrences in draw order so the result is seed-stable
        _, first = np.unique(new, return_index=True)
        new = new[np.sort(first)]
        new = new[~np.isin(new, keys)]
        keys = np.concatenate([keys, new[:need]])
    return _from_pairs(n, keys // n, keys % n, directed=directed)


def gnp_random_graph(n: int, p: float, seed: int, directed: bool = False) -> SocialGraph:
    rng = np.random.default_rng(seed)
    if directed:
        hit = rng.random((n, n)) < p
        np.fill_diagonal(hit, False)
        rows, cols = np.nonzero(hit)
    else:
        rows, cols = np.triu_indices(n, k=1)
        keep = rng.random(len(rows)) < p
        rows, cols = rows[keep], cols[keep]
    return _from_pairs(n, rows, cols, directed=directed)


def path_graph(n: int) -> SocialGraph:
    return SocialGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> SocialGraph:
    return SocialGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> SocialGraph:
    """Center is node 0."""
    return SocialGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> SocialGraph:
    return SocialGraph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def petersen_graph() -> SocialGraph:
    """3-regular: outer 5-cycle 0..4, spokes i--i+5, inner pentagram."""
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return SocialGraph.from_edges(10, edges)
