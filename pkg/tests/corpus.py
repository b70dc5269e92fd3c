"""Seeded instances and an exact rational reference for equilibria."""
from fractions import Fraction

import numpy as np

from opinion_campaign.generate import cycle_graph, gnp_random_graph, path_graph, petersen_graph, star_graph


def random_instance(seed, n_lo=5, n_hi=30, p=None, directed=False):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_lo, n_hi + 1))
    p = float(rng.uniform(0.1, 0.5)) if p is None else p
    graph = gnp_random_graph(n, p, seed=int(rng.integers(2**31)), directed=directed)
    s = rng.random(n)
    return graph, s, rng


def campaign_corpus(count=50):
    """(name, graph, s, targets) including nonempty target sets."""
    out = [
        ("path2", path_graph(2), np.array([0.0, 1.0]), ()),
        ("path2-T", path_graph(2), np.array([0.0, 1.0]), (0,)),
        ("c6-cover", cycle_graph(6), np.zeros(6), (0, 2, 4)),
        ("star4", star_graph(4), np.array([1.0, 0, 0, 0, 0]), (1,)),
        ("petersen", petersen_graph(), np.linspace(0, 1, 10), (0, 7)),
    ]
    for seed in range(count):
        graph, s, rng = random_instance(seed)
        size = int(rng.integers(0, 6))
        T = tuple(sorted(rng.choice(graph.n, size=size, replace=False).tolist()))
        out.append((f"rand{seed}", graph, s, T))
    return out


def greedy_corpus(count=50):
    """(graph, s, k) with n <= 12 and k <= 3."""
    out = []
    for seed in range(count):
        graph, s, rng = random_instance(1000 + seed, n_lo=4, n_hi=12)
        out.append((graph, s, int(rng.integers(1, 4))))
    return out


def fraction_equilibrium(graph, s, targets=()):
    """Solve the averaging equations exactly over the rationals.

    Builds ``(1 + W_i) z_i - sum_j w_ij z_j = s_i`` for free nodes directly from
    the edge weights and runs Gauss-Jordan elimination with ``Fraction``.
    """
    n = graph.n
    T = set(targets)
    free = [i for i in range(n) if i not in T]
    pos = {v: k for k, v in enumerate(free)}
    m = len(free)
    A = [[Fraction(0)] * (m + 1) for _ in range(m)]
    for i in free:
        r = pos[i]
        nbrs, w = graph.neighbors(i)
        A[r][r] += 1
        A[r][m] += Fraction(s[i])
        for j, wij in zip(nbrs.tolist(), w.tolist()):
            wij = Fraction(wij)
            A[r][r] += wij
            if j in T:
                A[r][m] += wij
            else:
                A[r][pos[j]] -= wij
    for c in range(m):
        piv = next(r for r in range(c, m) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(m):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    z = [Fraction(1)] * n
    for i in free:
        z[i] = A[pos[i]][m]
    return z
