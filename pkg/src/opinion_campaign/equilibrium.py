"""Equilibrium expressed opinions under clamped targets.

Each free node's expressed opinion is the weighted average of its internal
opinion (weight 1) and its neighbours' expressed opinions::

    z_i = (s_i + sum_j w_ij z_j) / (1 + sum_j w_ij)

Targets keep ``z_t = 1``.  :func:`solve_power` iterates this map with full
(Jacobi) sweeps; :func:`solve_exact` solves the absorbing-walk linear system
densely and serves as the reference.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .graph import SocialGraph, build_augmented, target_mask

DENSE_MAX_NODES = 2000


@dataclass(frozen=True)
class SolverConfig:
    """Settings for equilibrium solves.

    ``method`` picks the solver used by the campaign algorithms: ``"power"``
    (sparse iteration) or ``"exact"`` (dense solve, small graphs only).
    ``threads`` caps the workers used for independent candidate solves when
    ``parallel`` is set; ``None`` means ``OPINION_CAMPAIGN_THREADS`` or the
    number of CPUs.
    """

    tolerance: float = 1e-8
    max_iterations: int = 10_000
    parallel: bool = False
    method: str = "power"
    threads: int | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.method not in ("power", "exact"):
            raise ValueError(f"unknown method {self.method!r}")

    def workers(self) -> int:
        if not self.parallel:
            return 1
        if self.threads is not None:
            return max(1, int(self.threads))
        env = os.environ.get("OPINION_CAMPAIGN_THREADS")
        if env:
            return max(1, int(env))
        return os.cpu_count() or 1


@dataclass
class SolveStats:
    iterations_used: int
    final_residual: float
    converged: bool
    residuals: list[float] = field(default_factory=list, repr=False)


def _check_opinions(graph: SocialGraph, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape != (graph.n,):
        raise ValueError(f"opinion vector has shape {s.shape}, expected ({graph.n},)")
    if s.size and (not np.all(np.isfinite(s)) or s.min() < 0 or s.max() > 1):
        raise ValueError("internal opinions must lie in [0, 1]")
    return s


def solve_power(graph: SocialGraph, s, targets=None, cfg: SolverConfig | None = None):
    """Jacobi iteration of the averaging map, starting from ``z = s``.

    Stops when the largest change in one sweep is at most ``cfg.tolerance``;
    ``iterations_used`` counts the sweeps whose change exceeded it, so a warm
    start that is already the fixed point reports 0.  When ``max_iterations``
    is hit the last iterate is returned with ``converged=False``.

    Returns
    -------
    z : ndarray
    stats : SolveStats
    """
    cfg = cfg or SolverConfig()
    s = _check_opinions(graph, s)
    mask = target_mask(graph.n, targets)
    free = ~mask
    W = graph.weights
    inv = 1.0 / (1.0 + graph.weighted_degree)
    base = s * inv

    z = s.copy()
    z[mask] = 1.0
    residuals: list[float] = []
    converged = not free.any()
    it = 0
    while not converged and it < cfg.max_iterations:
        z_new = base + inv * (W @ z)
        z_new[mask] = 1.0
        resid = float(np.max(np.abs(z_new - z)))
        z = z_new
        residuals.append(resid)
        if resid <= cfg.tolerance:
            converged = True
        else:
            it += 1
    final = residuals[-1] if residuals else 0.0
    return z, SolveStats(it, final, converged, residuals)


def solve_exact(graph: SocialGraph, s, targets=None) -> np.ndarray:
    """Equilibrium from the dense solve ``(I - P_UU) z_U = P_UB f_B``."""
    s = _check_opinions(graph, s)
    if graph.n > DENSE_MAX_NODES:
        raise ValueError(f"dense solver limited to {DENSE_MAX_NODES} nodes, graph has {graph.n}")
    system = build_augmented(graph, s, targets)
    z = np.ones(graph.n)
    U = system.transient
    if len(U) == 0:
        return z
    A = np.eye(len(U)) - system.P_UU.toarray()
    rhs = system.P_UB @ system.absorbing_values
    try:
        z[U] = scipy.linalg.solve(A, rhs, check_finite=False)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - copy edges keep A non-singular
        raise AssertionError("absorbing system is singular") from exc
    return z


def solve(graph: SocialGraph, s, targets=None, cfg: SolverConfig | None = None):
    """Dispatch to the solver named by ``cfg.method``; returns ``(z, stats)``."""
    cfg = cfg or SolverConfig()
    if cfg.method == "exact":
        return solve_exact(graph, s, targets), SolveStats(0, 0.0, True)
    return solve_power(graph, s, targets, cfg)


def overall_opinion(z, targets=None, include_targets: bool = True) -> float:
    """Sum of expressed opinions.

    By default clamped targets count (each contributes 1).  With
    ``include_targets=False`` only free nodes are summed, the convention of
    the vertex-cover reduction threshold ``(n - k) d / (d + 1)``.
    """
    z = np.asarray(z, dtype=float)
    if include_targets or targets is None:
        return float(z.sum())
    mask = target_mask(len(z), targets)
    return float(z[~mask].sum())
