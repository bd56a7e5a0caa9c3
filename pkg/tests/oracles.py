"""Independent reference implementations used as test oracles.

Nothing here imports the package under test.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def line_cover_count(xs, eps) -> int:
    """Minimum number of closed eps-balls centred at points of xs covering xs (1-D).

    Left-to-right sweep: the leftmost uncovered point a must be covered by
    some centre c <= a + eps; the rightmost such centre dominates the others.
    """
    xs = sorted(float(x) for x in xs)
    count, i, n = 0, 0, len(xs)
    while i < n:
        a = xs[i]
        j = i
        while j + 1 < n and xs[j + 1] <= a + eps:
            j += 1
        c = xs[j]
        count += 1
        while i < n and xs[i] <= c + eps:
            i += 1
    return count


def brute_cover_count(points, eps, p) -> int:
    """Smallest k such that some k cloud points cover the cloud, by enumeration."""
    P = np.asarray(points, dtype=complex)
    if P.ndim == 1:
        P = P[:, None]
    n = len(P)
    if n == 0:
        return 0
    D = np.linalg.norm(np.abs(P[:, None, :] - P[None, :, :]), ord=p, axis=2)
    near = D <= eps
    for k in range(1, n + 1):
        for combo in itertools.combinations(range(n), k):
            if near[list(combo)].any(axis=0).all():
                return k
    return n


def interval_entropy(k: int) -> Fraction:
    """Entropy number of [0,1] with k balls, centres anywhere: 1/(2k)."""
    return Fraction(1, 2 * k)


def leibniz_det(M):
    """Determinant by the permutation expansion."""
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inv % 2 else 1
        for i in range(n):
            term = term * M[i][perm[i]]
        total = total + term
    return total


def carl_stephani_lower_geometric(eps: float, n: int, N: int):
    """max over k of 2^{-(n-1)/(2k)} eps^{(k+1)/2}, with the maximising k."""
    vals = [(2.0 ** (-(n - 1) / (2 * k)) * eps ** ((k + 1) / 2), k) for k in range(1, N + 1)]
    return max(vals)


def monomial_count(nvars: int, degree: int) -> int:
    return math.comb(degree + nvars - 1, nvars - 1)


def line_cover_count_free(xs, eps) -> int:
    """Minimum number of closed eps-balls with centres anywhere on the line."""
    xs = sorted(float(x) for x in xs)
    count, i = 0, 0
    while i < len(xs):
        right = xs[i] + 2 * eps
        count += 1
        while i < len(xs) and xs[i] <= right:
            i += 1
    return count
