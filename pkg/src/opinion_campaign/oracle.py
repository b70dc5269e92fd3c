"""Independent checks: exhaustive search, absorbing-walk simulation, Nash test."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import solve_exact
from .graph import SocialGraph, build_augmented

BRUTE_FORCE_BUDGET = 10**6
MC_BATCH = 4096


@dataclass(frozen=True)
class WalkEstimate:
    mean: float
    half_width_95: float
    walks: int
    seed: int


def brute_force_optimal(graph: SocialGraph, s, k: int) -> tuple[tuple[int, ...], float]:
    """Best size-``k`` target set by enumerating every subset with the dense solver.

    Among equal objectives the lexicographically smallest subset wins.
    """
    n = graph.n
    if not 0 <= k <= n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    if math.comb(n, k) > BRUTE_FORCE_BUDGET:
        raise ValueError(f"C({n}, {k}) subsets exceeds the budget of {BRUTE_FORCE_BUDGET}")
    best, best_val = (), -math.inf
    for subset in itertools.combinations(range(n), k):
        val = float(solve_exact(graph, s, subset).sum())
        if val > best_val:
            best, best_val = subset, val
    return best, best_val


def _transition_table(graph: SocialGraph, s, targets):
    """Row-stacked cumulative transition keys over augmented nodes.

    The entries of row ``x`` hold ``x + cumprob``, so a single
    ``searchsorted(keys, x + u)`` samples a successor of ``x``.
    """
    system = build_augmented(graph, s, targets)
    n = graph.n
    N = 2 * n
    value = np.zeros(N)
    absorbing = np.zeros(N, dtype=bool)
    absorbing[system.absorbing] = True
    value[system.absorbing] = system.absorbing_values
    succ, keys = [], []
    rows = {int(u): pos for pos, u in enumerate(system.transient)}
    for x in range(N):
        if x in rows:
            pos = rows[x]
            ids, probs = [], []
            for P, cols in ((system.P_UU, system.transient), (system.P_UB, system.absorbing)):
                lo, hi = P.indptr[pos], P.indptr[pos + 1]
                ids.extend(cols[P.indices[lo:hi]].tolist())
                probs.extend(P.data[lo:hi].tolist())
            cum = np.cumsum(probs)
            cum[-1] = 1.0
            succ.extend(ids)
            keys.extend((x + np.minimum(cum, 1.0)).tolist())
    return np.asarray(succ, dtype=np.int64), np.asarray(keys), absorbing, value


def _simulate_batch(start: int, walks: int, rng: np.random.Generator, table) -> np.ndarray:
    succ, keys, absorbing, value = table
    pos = np.full(walks, start, dtype=np.int64)
    active = ~absorbing[pos]
    while active.any():
        idx = np.flatnonzero(active)
        u = rng.random(len(idx))
        # keys are x + cumprob, strictly increasing across rows
        k = np.searchsorted(keys, pos[idx] + u, side="right")
        pos[idx] = succ[k]
        active[idx] = ~absorbing[pos[idx]]
    return value[pos]


def monte_carlo_opinion(graph: SocialGraph, s, targets, i: int, walks: int, seed: int) -> WalkEstimate:
    """Estimate ``z_i`` as the average absorbed value of walks from ``i``.

    Walks are split into fixed batches of :data:`MC_BATCH` by walk index;
    batch ``b`` draws from the ``b``-th spawned child of ``SeedSequence(seed)``
    and batch statistics are merged pairwise (Chan et al.), so the result
    depends only on ``(seed, walks)``.
    """
    if walks < 1:
        raise ValueError("walks must be >= 1")
    if targets is not None and i in set(int(t) for t in targets):
        raise ValueError(f"node {i} is a target; its opinion is fixed at 1")
    table = _transition_table(graph, s, targets)
    n_batches = -(-walks // MC_BATCH)
    children = np.random.SeedSequence(seed).spawn(n_batches)
    count, mean, m2 = 0, 0.0, 0.0
    for b, child in enumerate(children):
        size = min(MC_BATCH, walks - b * MC_BATCH)
        vals = _simulate_batch(i, size, np.random.default_rng(child), table)
        bm = float(vals.mean())
        bm2 = float(((vals - bm) ** 2).sum())
        tot = count + size
        delta = bm - mean
        mean += delta * size / tot
        m2 += bm2 + delta * delta * count * size / tot
        count = tot
    var = m2 / (count - 1) if count > 1 else 0.0
    return WalkEstimate(mean, 1.96 * math.sqrt(var / count), count, seed)


def personal_cost(graph: SocialGraph, s, z, i: int) -> float:
    """``(s_i - z_i)^2 + sum_j w_ij (z_i - z_j)^2`` over out-neighbours ``j``."""
    s = np.asarray(s, dtype=float)
    z = np.asarray(z, dtype=float)
    nbrs, w = graph.neighbors(i)
    return float((s[i] - z[i]) ** 2 + np.sum(w * (z[i] - z[nbrs]) ** 2))


def nash_violations(graph: SocialGraph, s, z, targets=(), delta: float = 1e-4, slack: float = 1e-8) -> list[int]:
    """Free nodes that lower their own cost by more than ``slack`` when moving ``z_i`` by ``+-delta``."""
    s = np.asarray(s, dtype=float)
    z = np.asarray(z, dtype=float)
    fixed = set(int(t) for t in targets)
    bad = []
    for i in range(graph.n):
        if i in fixed:
            continue
        c0 = personal_cost(graph, s, z, i)
        for step in (delta, -delta):
            zp = z.copy()
            zp[i] += step
            if personal_cost(graph, s, zp, i) < c0 - slack:
                bad.append(i)
                break
    return bad
