"""Two-sided entropy bounds for diagonal operators on sup-normed sequence spaces.

For weights w_1 >= ... >= w_N > 0 the image K^N of the unit ball under
x -> (w_1 x_1, ..., w_N x_N) satisfies

    sup_{k<=N} 2^{-(n-1)/(2k)} g_k  <=  e_n(K^N)  <=  6 sup_{k<N} 2^{-(n-1)/(2k)} g_k

with g_k = (w_1 ... w_k)^{1/k}. All terms are evaluated in log space.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .covering import EntropyProfile
from .metric import PointCloud, RejectedInput, sample_polydisc

SIGMA_CAP = 5


class BracketInversionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DiagonalModel:
    weights: tuple
    p: float = math.inf

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise RejectedInput("a diagonal model needs at least one weight")
        if any(not x > 0 for x in w):
            raise RejectedInput("weights must be strictly positive")
        if any(b > a for a, b in zip(w, w[1:])):
            raise RejectedInput("weights must be nonincreasing")
        object.__setattr__(self, "weights", w)

    @classmethod
    def geometric(cls, epsilon: float, N: int) -> "DiagonalModel":
        """Weights epsilon^k, k = 1..N."""
        if not 0.0 < epsilon < 1.0:
            raise RejectedInput("epsilon must lie in (0, 1)")
        return cls(tuple(epsilon ** k for k in range(1, N + 1)))

    @property
    def N(self) -> int:
        return len(self.weights)

    def log2_geometric_means(self) -> np.ndarray:
        logs = np.cumsum(np.log2(self.weights))
        return logs / np.arange(1, self.N + 1)

    def sample(self, count: int, seed: int = 0) -> PointCloud:
        """Uniform sample of the image of the unit polydisc."""
        cloud = sample_polydisc(self.weights, count, seed, self.p)
        return PointCloud(cloud.points, self.p, f"diagonal(N={self.N})")


class Bracket(NamedTuple):
    lower: float
    upper: float


def carl_stephani_log2_terms(model: DiagonalModel, n: int) -> np.ndarray:
    """log2 of 2^{-(n-1)/(2k)} g_k for k = 1..N."""
    k = np.arange(1, model.N + 1)
    return -(n - 1) / (2.0 * k) + model.log2_geometric_means()


def carl_stephani_bounds(model: DiagonalModel, n: int) -> Bracket:
    if n < 1:
        raise RejectedInput("n must be >= 1")
    t = carl_stephani_log2_terms(model, n)
    lower = 2.0 ** t.max()
    # the upper supremum runs over k < N; for N = 1 only the k = 1 term exists
    upper = 6.0 * 2.0 ** (t[:-1].max() if model.N > 1 else t[0])
    if lower > upper:
        warnings.warn(f"lower bound exceeds upper bound at n={n}, N={model.N}",
                      BracketInversionWarning, stacklevel=2)
    return Bracket(float(lower), float(upper))


def example_K_profile(epsilon: float, N: int, n_max: int) -> EntropyProfile:
    """Analytic brackets on e_n(K), K = {|x_k| <= epsilon^k}, via its N-truncation.

    The truncation moves every point by at most epsilon^N, which is added to
    the upper bound.
    """
    model = DiagonalModel.geometric(epsilon, N)
    tail = epsilon ** N
    lo, up = [], []
    for n in range(1, n_max + 1):
        b = carl_stephani_bounds(model, n)
        lo.append(b.lower)
        up.append(b.upper + tail)
    return EntropyProfile.from_arrays(range(1, n_max + 1), lo, up, "carl-stephani")


@dataclass(frozen=True)
class Envelope:
    C1: float
    C2: float
    s: float
    S: float

    def lower(self, n):
        return self.C1 * self.s ** np.sqrt(np.asarray(n, dtype=float) - 1.0)

    def upper(self, n):
        return self.C2 * self.S ** np.sqrt(np.asarray(n, dtype=float) - 1.0)


def asymptotic_envelope(epsilon: float, n_range, N: int = 64) -> Envelope:
    """Tightest C1, C2 with C1 s^sqrt(n-1) <= lower_n and upper_n <= C2 S^sqrt(n-1).

    s = min(epsilon, 1/2), S = max(epsilon, 1/2), fitted over ``n_range``
    against the brackets of ``example_K_profile(epsilon, N, max(n_range))``.
    """
    ns = np.array(sorted(set(int(n) for n in n_range)))
    if ns.size == 0 or ns[0] < 1:
        raise RejectedInput("n_range must be a nonempty set of positive integers")
    s, S = min(epsilon, 0.5), max(epsilon, 0.5)
    prof = example_K_profile(epsilon, N, int(ns[-1]))
    lo, up = prof.lower[ns - 1], prof.upper[ns - 1]
    root = np.sqrt(ns - 1.0)
    C1 = float(np.min(lo / s ** root))
    C2 = float(np.max(up / S ** root))
    env = Envelope(C1, C2, s, S)
    # floating point may break the fit by an ulp; nudge until it re-verifies
    while np.any(env.lower(ns) > lo):
        env = Envelope(math.nextafter(env.C1, 0.0), env.C2, s, S)
    while np.any(env.upper(ns) < up):
        env = Envelope(env.C1, math.nextafter(env.C2, math.inf), s, S)
    return env


@dataclass(frozen=True)
class SigmaPartition:
    """Consecutive index blocks of sizes 1!, 2!, ..., N_max! starting at 1."""

    N_max: int

    @property
    def blocks(self):
        out, start = [], 1
        for m in range(1, self.N_max + 1):
            size = math.factorial(m)
            out.append(range(start, start + size))
            start += size
        return out

    @property
    def size(self) -> int:
        return sum(math.factorial(m) for m in range(1, self.N_max + 1))

    def degree_of(self, j: int) -> int:
        """Block number (= coordinate power) of the 1-based index j."""
        for m, block in enumerate(self.blocks, start=1):
            if j in block:
                return m
        raise RejectedInput(f"index {j} outside the partition")


@dataclass(frozen=True)
class SigmaRow:
    N: int
    n: int
    lower: float
    upper: float
    multiplicity: int
    partial_sums: dict


SIGMA_POWERS = (1.0, 1.5, 2.0)


def sigma_partition_profile(r: int, N_max: int, powers=SIGMA_POWERS):
    """Block entropy brackets at n = N! + 1 for the sigma-powers map on 2^-r B.

    Block N of the image is the polydisc of N! coordinates of radius 2^{-rN};
    its lower bound is the supremum over k <= N! evaluated directly, the
    upper bound six times that. Partial sums accumulate
    ((N+1)! - N!) * lower^p.
    """
    if r < 1:
        raise RejectedInput("r must be >= 1")
    if N_max > SIGMA_CAP:
        raise RejectedInput(f"N_max={N_max} exceeds the factorial cap {SIGMA_CAP}")
    rows, sums = [], {p: 0.0 for p in powers}
    for N in range(1, N_max + 1):
        size = math.factorial(N)
        model = DiagonalModel((2.0 ** (-r * N),) * size)
        lower = carl_stephani_bounds(model, size + 1).lower
        mult = math.factorial(N + 1) - size
        for p in powers:
            sums[p] += mult * lower ** p
        rows.append(SigmaRow(N, size + 1, lower, 6.0 * lower, mult, dict(sums)))
    return rows
