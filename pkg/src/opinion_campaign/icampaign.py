"""Internal-opinion campaigns and the opinion-sum invariants.

On an undirected graph with no clamped nodes the equilibrium satisfies
``sum(z) == sum(s)`` whatever the edges are, so raising ``k`` internal
opinions to 1 is solved exactly by taking the ``k`` smallest.  With clamped
nodes only the edge-weighted form survives::

    sum over transient->absorbing edges (i, j) of w_ij * (z_i - f_j) == 0
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import SolverConfig, solve
from .graph import AbsorbingSystem, SocialGraph


@dataclass(frozen=True)
class InvariantReport:
    form: str
    lhs: float
    rhs: float
    absolute_gap: float
    passed: bool

    def csv_row(self) -> str:
        return f"{self.form},{self.lhs!r},{self.rhs!r},{self.absolute_gap!r},{str(self.passed).lower()}"


def icampaign_select(s, k: int) -> tuple[int, ...]:
    """Indices of the ``k`` smallest internal opinions, ties by smallest id."""
    s = np.asarray(s, dtype=float)
    if not 1 <= k <= len(s):
        raise ValueError(f"k must be in [1, {len(s)}], got {k}")
    order = np.argsort(s, kind="stable")
    return tuple(int(i) for i in order[:k])


def icampaign_objective(s, selected) -> float:
    """Opinion sum after setting the selected internal opinions to 1."""
    s = np.asarray(s, dtype=float).copy()
    s[list(selected)] = 1.0
    return float(s.sum())


def _require_undirected(graph: SocialGraph) -> None:
    if graph.directed:
        raise ValueError("the opinion-sum invariant is only established for undirected graphs")


def verify_invariant_special(graph: SocialGraph, s, cfg: SolverConfig | None = None) -> InvariantReport:
    """Compare ``sum(z)`` with ``sum(s)`` at the unclamped equilibrium."""
    _require_undirected(graph)
    z, _ = solve(graph, s, None, cfg)
    lhs, rhs = float(np.sum(z)), float(np.sum(s))
    gap = abs(lhs - rhs)
    return InvariantReport("special", lhs, rhs, gap, bool(gap <= 1e-6 * graph.n))


def boundary_edges(system: AbsorbingSystem, graph: SocialGraph):
    """Transient-to-absorbing edges ``(u, b, w_ub, f_b)`` in augmented ids.

    Each pair is reported separately, which is the same as splitting every
    absorbing node into one copy per transient neighbour.
    """
    pos_of_target = {int(b): idx for idx, b in enumerate(system.absorbing)}
    W = graph.weights
    for u in system.transient.tolist():
        yield u, system.copy_of(u), 1.0, float(system.absorbing_values[u])
        lo, hi = W.indptr[u], W.indptr[u + 1]
        for j, w in zip(W.indices[lo:hi].tolist(), W.data[lo:hi].tolist()):
            idx = pos_of_target.get(j)
            if idx is not None:
                yield u, j, w, float(system.absorbing_values[idx])


def verify_invariant_general(system: AbsorbingSystem, graph: SocialGraph, z) -> InvariantReport:
    """Check ``sum w_ij (z_i - f_j) == 0`` over the boundary edges.

    ``lhs`` is ``sum w_ij z_i`` and ``rhs`` is ``sum w_ij f_j``; the check
    passes when the gap is at most ``1e-6`` per boundary edge.
    """
    _require_undirected(graph)
    z = np.asarray(z, dtype=float)
    lhs = rhs = 0.0
    count = 0
    for u, _, w, f in boundary_edges(system, graph):
        lhs += w * float(z[u])
        rhs += w * f
        count += 1
    gap = abs(lhs - rhs)
    return InvariantReport("general", lhs, rhs, gap, bool(gap <= 1e-6 * count))
