"""Target selection for maximizing the equilibrium opinion sum.

Given internal opinions ``s`` and a budget ``k``, pick ``k`` nodes whose
expressed opinion is clamped to 1 so that ``g(z | T) = sum(z)`` is as large
as possible.  The objective is monotone and submodular, so greedy selection
is within ``1 - 1/e`` of the optimum; the lazy variant reuses stale gains as
upper bounds.  The heuristics only produce an ordering, which
:func:`evaluate_curve` turns into an objective curve.
"""
from __future__ import annotations

import heapq
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import SolverConfig, overall_opinion, solve
from .graph import SocialGraph, in_degrees, target_mask

ALGORITHMS = ("greedy", "lazy-greedy", "degree", "free-degree", "rwr", "min-s", "min-z")

# gains this close to the best count as ties (smallest id wins)
TIE_TOL = 1e-9
# refresh every lazy candidate whose stale gain is within this of the leader,
# so numerical noise in the bounds cannot change the selection
LAZY_SLACK = 1e-6


class DegenerateRestartWarning(UserWarning):
    """All internal opinions equal; RWR restarts uniformly instead."""


@dataclass(frozen=True)
class CampaignStep:
    node: int
    gain: float
    objective: float


@dataclass
class CampaignResult:
    algorithm: str
    baseline: float
    selections: list[CampaignStep] = field(default_factory=list)
    iterations: int = 0
    solves: int = 0
    unconverged: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def nodes(self) -> list[int]:
        return [st.node for st in self.selections]

    @property
    def gains(self) -> list[float]:
        return [st.gain for st in self.selections]

    @property
    def objectives(self) -> list[float]:
        return [st.objective for st in self.selections]

    @property
    def final_objective(self) -> float:
        return self.selections[-1].objective if self.selections else self.baseline


class _Evaluator:
    """Counts solves and iterations behind ``g(z | T)`` evaluations."""

    def __init__(self, graph: SocialGraph, s, cfg: SolverConfig):
        self.graph = graph
        self.s = np.asarray(s, dtype=float)
        self.cfg = cfg
        self.solves = 0
        self.iterations = 0
        self.unconverged = 0

    def objective(self, targets) -> float:
        z, stats = solve(self.graph, self.s, targets, self.cfg)
        self.solves += 1
        self.iterations += stats.iterations_used
        self.unconverged += not stats.converged
        return overall_opinion(z)

    def with_each(self, targets: list[int], candidates: list[int]) -> list[float]:
        workers = self.cfg.workers()
        sets = [targets + [j] for j in candidates]
        if workers > 1 and len(sets) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(self.objective, sets))
        return [self.objective(t) for t in sets]


def _validate_k(graph: SocialGraph, k: int) -> None:
    if not 1 <= k <= graph.n:
        raise ValueError(f"k must be in [1, {graph.n}], got {k}")


def objective(graph: SocialGraph, s, targets=(), cfg: SolverConfig | None = None) -> float:
    """``g(z | T)``, counting clamped targets."""
    return _Evaluator(graph, s, cfg or SolverConfig()).objective(list(targets))


def marginal_gain(graph: SocialGraph, s, targets, j: int, cfg: SolverConfig | None = None) -> float:
    """``g(z | T + j) - g(z | T)`` from two equilibrium solves."""
    targets = [int(t) for t in targets]
    target_mask(graph.n, targets + [j])  # raises if j is already a target or out of range
    ev = _Evaluator(graph, s, cfg or SolverConfig())
    return ev.objective(targets + [j]) - ev.objective(targets)


def greedy(graph: SocialGraph, s, k: int, cfg: SolverConfig | None = None, lazy: bool = False) -> CampaignResult:
    """Greedy selection; gains within ``TIE_TOL`` of the best tie and the smallest id wins.

    The lazy variant keeps a max-heap of stale gains and refreshes entries
    until no stale bound can beat the best refreshed gain, then applies the
    same (gain, id) rule to the refreshed entries, so both variants select
    identical sequences.
    """
    cfg = cfg or SolverConfig()
    _validate_k(graph, k)
    ev = _Evaluator(graph, s, cfg)
    g = ev.objective([])
    result = CampaignResult("lazy-greedy" if lazy else "greedy", baseline=g)
    chosen: list[int] = []

    if not lazy:
        for _ in range(k):
            taken = set(chosen)
            cands = [j for j in range(graph.n) if j not in taken]
            vals = np.asarray(ev.with_each(chosen, cands))
            best = int(np.flatnonzero(vals >= vals.max() - TIE_TOL)[0])
            node, g_new = cands[best], float(vals[best])
            result.selections.append(CampaignStep(node, g_new - g, g_new))
            chosen.append(node)
            g = g_new
    else:
        cands = list(range(graph.n))
        vals = ev.with_each([], cands)
        # entries: (-gain, node, g_with, step at which gain was computed)
        heap = [(-(v - g), j, v, 0) for j, v in zip(cands, vals)]
        heapq.heapify(heap)
        for step in range(k):
            fresh: list[tuple[float, int, float]] = []
            best_gain = -np.inf
            while heap:
                neg, j, v, stamp = heap[0]
                if fresh and -neg < best_gain - LAZY_SLACK:
                    break
                heapq.heappop(heap)
                if stamp != step:
                    v = ev.objective(chosen + [j])
                fresh.append((v - g, j, v))
                best_gain = max(best_gain, v - g)
            top = max(e[0] for e in fresh)
            gain, node, g_new = min((e for e in fresh if e[0] >= top - TIE_TOL), key=lambda e: e[1])
            result.selections.append(CampaignStep(node, gain, g_new))
            chosen.append(node)
            g = g_new
            for gn, j, v in fresh:
                if j != node:
                    heapq.heappush(heap, (-gn, j, v, step))
    result.iterations, result.solves, result.unconverged = ev.iterations, ev.solves, ev.unconverged
    return result


def _top_k(score: np.ndarray, k: int) -> tuple[int, ...]:
    order = np.argsort(-score, kind="stable")
    return tuple(int(i) for i in order[:k])


def heuristic_degree(graph: SocialGraph, k: int) -> tuple[int, ...]:
    """Top-``k`` nodes by weighted in-degree."""
    return _top_k(in_degrees(graph), k)


def heuristic_free_degree(graph: SocialGraph, k: int) -> tuple[int, ...]:
    """Repeatedly pick the node with the largest in-weight from unselected nodes."""
    free = in_degrees(graph).astype(float)
    W = graph.weights
    picked = np.zeros(graph.n, dtype=bool)
    out = []
    for _ in range(min(k, graph.n)):
        score = np.where(picked, -np.inf, free)
        v = int(np.argmax(score))
        out.append(v)
        picked[v] = True
        nbrs = W.indices[W.indptr[v]:W.indptr[v + 1]]
        free[nbrs] -= W.data[W.indptr[v]:W.indptr[v + 1]]
    return tuple(out)


def rwr_scores(graph: SocialGraph, s, alpha: float = 0.15, cfg: SolverConfig | None = None):
    """Stationary distribution of a walk restarting at ``i`` with mass ``max(s) - s_i``.

    Dangling nodes send their mass to the restart distribution.  Returns
    ``(pi, degenerate)`` where ``degenerate`` flags the uniform fallback used
    when every ``s_i`` is equal.
    """
    cfg = cfg or SolverConfig()
    n = graph.n
    s = np.asarray(s, dtype=float)
    r = s.max() - s
    degenerate = not r.sum() > 0
    r = np.full(n, 1.0 / n) if degenerate else r / r.sum()
    deg = graph.weighted_degree
    dangling = deg == 0
    inv = np.divide(1.0, deg, out=np.zeros(n), where=~dangling)
    WT = graph.weights.T.tocsr()
    pi = np.full(n, 1.0 / n)
    for _ in range(cfg.max_iterations):
        walk = WT @ (pi * inv) + pi[dangling].sum() * r
        new = alpha * r + (1 - alpha) * walk
        delta = float(np.abs(new - pi).sum())
        pi = new
        if delta <= cfg.tolerance:
            break
    return pi, degenerate


def heuristic_rwr(graph: SocialGraph, s, k: int, alpha: float = 0.15, cfg: SolverConfig | None = None) -> tuple[int, ...]:
    pi, degenerate = rwr_scores(graph, s, alpha, cfg)
    if degenerate:
        warnings.warn("all internal opinions are equal; using uniform restart", DegenerateRestartWarning, stacklevel=2)
    return _top_k(pi, k)


def heuristic_min_s(s, k: int) -> tuple[int, ...]:
    return _top_k(-np.asarray(s, dtype=float), k)


def heuristic_min_z(graph: SocialGraph, s, k: int, cfg: SolverConfig | None = None) -> tuple[int, ...]:
    """Repeatedly clamp the free node with the smallest current expressed opinion."""
    cfg = cfg or SolverConfig()
    chosen: list[int] = []
    for _ in range(min(k, graph.n)):
        z, _ = solve(graph, s, chosen, cfg)
        z[chosen] = np.inf
        chosen.append(int(np.argmin(z)))
    return tuple(chosen)


def evaluate_curve(graph: SocialGraph, s, ordered_nodes, cfg: SolverConfig | None = None, algorithm: str = "custom") -> CampaignResult:
    """Objective after clamping each prefix of ``ordered_nodes``."""
    cfg = cfg or SolverConfig()
    order = [int(v) for v in ordered_nodes]
    target_mask(graph.n, order)  # duplicates / range
    ev = _Evaluator(graph, s, cfg)
    g = ev.objective([])
    result = CampaignResult(algorithm, baseline=g)
    for t in range(len(order)):
        g_new = ev.objective(order[:t + 1])
        result.selections.append(CampaignStep(order[t], g_new - g, g_new))
        g = g_new
    result.iterations, result.solves, result.unconverged = ev.iterations, ev.solves, ev.unconverged
    return result


def run_algorithm(name: str, graph: SocialGraph, s, k: int, cfg: SolverConfig | None = None, alpha: float = 0.15) -> CampaignResult:
    """Run one of :data:`ALGORITHMS` and return its objective curve."""
    cfg = cfg or SolverConfig()
    _validate_k(graph, k)
    if name in ("greedy", "lazy-greedy"):
        return greedy(graph, s, k, cfg, lazy=name == "lazy-greedy")
    notes = []
    if name == "degree":
        order = heuristic_degree(graph, k)
    elif name == "free-degree":
        order = heuristic_free_degree(graph, k)
    elif name == "rwr":
        pi, degenerate = rwr_scores(graph, s, alpha, cfg)
        if degenerate:
            notes.append("degenerate restart: uniform fallback")
        order = _top_k(pi, k)
    elif name == "min-s":
        order = heuristic_min_s(s, k)
    elif name == "min-z":
        order = heuristic_min_z(graph, s, k, cfg)
    else:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    result = evaluate_curve(graph, s, order, cfg, algorithm=name)
    result.warnings.extend(notes)
    return result
