"""Covering numbers, packings and (dyadic) entropy numbers of point clouds.

Balls are closed: a point is covered by a center at distance ``<= radius``.
Packings are strict: an eps-separated set has pairwise distances ``> eps``.
With these conventions, for any cloud L

    packing(L, 2 eps) <= N(L, eps) <= packing(L, eps)

where N counts balls centered at cloud points.

Upper bounds on entropy numbers come from cloud-centered covers and are
therefore upper bounds for centers anywhere. Lower bounds come from
separated subsets and hold for centers anywhere in the ambient space.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .metric import PointCloud, RejectedInput, distances_to, pairwise_distances

#: bisection on radii stops once the bracket is this fraction of the diameter
RELATIVE_BISECTION_WIDTH = 1e-9


class SizeLimitError(RejectedInput):
    pass


class RatioWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Cover:
    centers: np.ndarray
    radius: float
    p: float
    indices: tuple = ()

    def __len__(self):
        return self.centers.shape[0]


def nearest_center(points: np.ndarray, centers: np.ndarray, p, chunk: int = 4096):
    """Index of (and distance to) the nearest center for every point.

    Ties go to the lowest center index.
    """
    n = points.shape[0]
    idx = np.empty(n, dtype=np.int64)
    dist = np.empty(n, dtype=float)
    if centers.shape[0] == 0:
        idx[:] = -1
        dist[:] = np.inf
        return idx, dist
    step = max(1, chunk * 64 // max(centers.shape[0], 1))
    for s in range(0, n, step):
        d = pairwise_distances(points[s:s + step], centers, p)
        idx[s:s + step] = d.argmin(axis=1)
        dist[s:s + step] = d[np.arange(d.shape[0]), idx[s:s + step]]
    return idx, dist


def verify_cover(cover: Cover, cloud: PointCloud) -> bool:
    if len(cloud) == 0:
        return True
    if len(cover) == 0:
        return False
    _, dist = nearest_center(cloud.points, cover.centers, cloud.p)
    return bool(np.all(dist <= cover.radius))


def farthest_point_traversal(cloud: PointCloud, max_centers: int | None = None,
                             epsilon: float | None = None):
    """Gonzalez traversal starting at point 0.

    Returns ``(indices, radii)`` where ``radii[k]`` is the covering radius of
    the first ``k + 1`` centers. Stops after ``max_centers`` centers, or as
    soon as the covering radius is ``<= epsilon``. Ties pick the lowest index.
    """
    n = len(cloud)
    if n == 0:
        return [], []
    pts, p = cloud.points, cloud.p
    limit = n if max_centers is None else min(max_centers, n)
    mind = distances_to(pts, pts[0], p)
    indices, radii = [0], []
    while True:
        far = int(np.argmax(mind))
        r = float(mind[far])
        radii.append(r)
        if len(indices) >= limit or r == 0.0 or (epsilon is not None and r <= epsilon):
            break
        indices.append(far)
        np.minimum(mind, distances_to(pts, pts[far], p), out=mind)
    return indices, radii


def greedy_cover(cloud: PointCloud, epsilon: float) -> Cover:
    """Cloud-centered cover at radius ``epsilon`` from farthest-point traversal.

    The number of centers is an upper bound on the covering number only.
    """
    if not epsilon > 0:
        raise RejectedInput("epsilon must be positive")
    idx, _ = farthest_point_traversal(cloud, epsilon=epsilon)
    return Cover(cloud.points[idx], float(epsilon), cloud.p, tuple(idx))


def greedy_packing(points: np.ndarray, p, separation: float, stop_after: int | None = None):
    """Maximal ``separation``-separated subset, scanning points in index order.

    With ``stop_after`` the scan ends as soon as more than that many points
    are selected (the result is then not maximal).
    """
    alive = np.arange(points.shape[0])
    chosen = []
    while alive.size:
        i = int(alive[0])
        chosen.append(i)
        if stop_after is not None and len(chosen) > stop_after:
            break
        rest = alive[1:]
        alive = rest[distances_to(points[rest], points[i], p) > separation]
    return chosen


def packing_number(cloud: PointCloud, epsilon: float) -> int:
    """Size of a greedy maximal eps-separated subset of the cloud."""
    if not epsilon > 0:
        raise RejectedInput("epsilon must be positive")
    return len(greedy_packing(cloud.points, cloud.p, epsilon))


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _disjoint_lower_bound(uncovered: int, masks) -> int:
    # uncovered points whose candidate sets are pairwise disjoint each need their own center
    elems = [e for e in range(len(masks)) if uncovered >> e & 1]
    elems.sort(key=lambda e: _popcount(masks[e]))
    used = 0
    count = 0
    for e in elems:
        if masks[e] & used == 0:
            used |= masks[e]
            count += 1
    return count


def exact_covering_number(cloud: PointCloud, epsilon: float, limit: int = 64) -> int:
    """Minimum number of closed eps-balls centered at cloud points covering the cloud.

    Branch-and-bound over candidate centers; exponential in the worst case,
    so clouds larger than ``limit`` are refused.
    """
    n = len(cloud)
    if n > limit:
        raise SizeLimitError(
            f"cloud has {n} points > limit {limit}; use greedy_cover for large clouds")
    if not epsilon > 0:
        raise RejectedInput("epsilon must be positive")
    return _covering_count(cloud, epsilon)


def _covering_count(cloud: PointCloud, epsilon: float) -> int:
    n = len(cloud)
    if n == 0:
        return 0
    d = pairwise_distances(cloud.points, cloud.points, cloud.p)
    within = d <= epsilon
    masks = [sum(1 << int(j) for j in np.flatnonzero(within[i])) for i in range(n)]
    full = (1 << n) - 1

    # greedy set cover gives the initial incumbent
    unc, best = full, 0
    while unc:
        c = max(range(n), key=lambda i: (_popcount(masks[i] & unc), -i))
        unc &= ~masks[c]
        best += 1

    seen: dict[int, int] = {}

    def search(uncovered: int, depth: int):
        nonlocal best
        if uncovered == 0:
            best = min(best, depth)
            return
        if depth + _disjoint_lower_bound(uncovered, masks) >= best:
            return
        if seen.get(uncovered, n + 1) <= depth:
            return
        seen[uncovered] = depth
        # branch on the uncovered point with the fewest candidate centers
        e = min((i for i in range(n) if uncovered >> i & 1),
                key=lambda i: _popcount(masks[i]))
        cands = [c for c in range(n) if masks[e] >> c & 1]
        cands.sort(key=lambda c: -_popcount(masks[c] & uncovered))
        for c in cands:
            search(uncovered & ~masks[c], depth + 1)

    search(full, 0)
    return best


class Bracket(NamedTuple):
    lower: float
    upper: float


def _packing_lower(cloud: PointCloud, n: int, start: float, diam: float) -> float:
    """Largest r (by bisection) with more than n points pairwise > 2r apart."""
    pts, p = cloud.points, cloud.p
    if len(greedy_packing(pts, p, 0.0, stop_after=n)) <= n:
        return 0.0
    lo, hi = start, diam / 2.0
    if hi <= lo:
        return lo
    width = RELATIVE_BISECTION_WIDTH * diam
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if len(greedy_packing(pts, p, 2.0 * mid, stop_after=n)) > n:
            lo = mid
        else:
            hi = mid
    return lo


def _bracket_from_radii(cloud, n, radii, diam) -> Bracket:
    if len(cloud) == 0:
        return Bracket(0.0, 0.0)
    upper = radii[min(n, len(radii)) - 1]
    if upper == 0.0:
        return Bracket(0.0, 0.0)
    # the first n+1 traversal centers are pairwise >= radii[n-1] apart
    lower = _packing_lower(cloud, n, upper / 2.0, diam)
    return Bracket(min(lower, upper), upper)


def entropy_number(cloud: PointCloud, n: int) -> Bracket:
    """Certified bracket on the n-th entropy number of the cloud.

    ``upper`` is the farthest-point covering radius with ``n`` centers, which
    is exactly the smallest radius at which ``greedy_cover`` needs at most
    ``n`` centers. ``lower`` is the largest radius certified by a separated
    subset with more than ``n`` points.
    """
    if n < 1:
        raise RejectedInput("n must be >= 1")
    _, radii = farthest_point_traversal(cloud, max_centers=n)
    return _bracket_from_radii(cloud, n, radii, cloud.diameter())


def exact_entropy_number(cloud: PointCloud, n: int, limit: int = 64) -> float:
    """Smallest radius at which n cloud-centered balls cover a small cloud."""
    if len(cloud) > limit:
        raise SizeLimitError(f"cloud has {len(cloud)} points > limit {limit}")
    if len(cloud) <= n:
        return 0.0
    d = pairwise_distances(cloud.points, cloud.points, cloud.p)
    # the answer is one of the pairwise distances (0 when duplicates suffice)
    radii = np.unique(d)
    lo, hi = 0, radii.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _covering_count(cloud, float(radii[mid])) <= n:
            hi = mid
        else:
            lo = mid + 1
    return float(radii[lo])


@dataclass(frozen=True)
class EntropyEntry:
    n: int
    lower: float
    upper: float
    method: str = ""


@dataclass(frozen=True)
class EntropyProfile:
    """Per-index brackets on dyadic entropy numbers, nonincreasing in n."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        for a in entries:
            if not 0.0 <= a.lower <= a.upper:
                raise ValueError(f"entry n={a.n}: need 0 <= lower <= upper, got {a}")
        for a, b in zip(entries, entries[1:]):
            if b.n <= a.n:
                raise ValueError("entry indices must increase")
            if b.upper > a.upper or b.lower > a.lower:
                raise ValueError(f"bounds must be nonincreasing in n (n={a.n} -> {b.n})")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def n(self):
        return np.array([e.n for e in self.entries])

    @property
    def lower(self):
        return np.array([e.lower for e in self.entries])

    @property
    def upper(self):
        return np.array([e.upper for e in self.entries])

    @classmethod
    def from_arrays(cls, ns, lower, upper, method=""):
        return cls(tuple(EntropyEntry(int(k), float(a), float(b), method)
                         for k, a, b in zip(ns, lower, upper)))


def dyadic_brackets(cloud: PointCloud, n_max: int, workers: int | None = None):
    """Raw brackets on e_n = entropy_number(cloud, 2**(n-1)), n = 1..n_max."""
    if n_max < 1:
        raise RejectedInput("n_max must be >= 1")
    ks = [2 ** (n - 1) for n in range(1, n_max + 1)]
    _, radii = farthest_point_traversal(cloud, max_centers=ks[-1])
    diam = cloud.diameter()

    def one(k):
        return _bracket_from_radii(cloud, k, radii, diam)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(one, ks))
    return [one(k) for k in ks]


def dyadic_entropy_profile(cloud: PointCloud, n_max: int,
                           workers: int | None = None) -> EntropyProfile:
    """Brackets on the dyadic entropy numbers e_1..e_{n_max} of the cloud.

    Upper bounds are made monotone by a running minimum; lower bounds by a
    running maximum from the right (both stay certified since e_n is
    nonincreasing).
    """
    raw = dyadic_brackets(cloud, n_max, workers)
    upper = np.minimum.accumulate([b.upper for b in raw])
    lower = np.maximum.accumulate([b.lower for b in raw][::-1])[::-1]
    lower = np.minimum(lower, upper)
    return EntropyProfile.from_arrays(range(1, n_max + 1), lower, upper, "greedy/packing")


#: Connected sets satisfy liminf e_{n+1}/e_n >= 1/5.
CONNECTED_RATIO_FLOOR = 0.2


@dataclass(frozen=True)
class RatioRow:
    n: int
    upper_ratio: float
    lower_ratio: float
    certified_max: float
    flagged: bool


def _ratio(a, b):
    if b == 0.0:
        return 1.0 if a == 0.0 else math.inf
    return a / b


def ratio_diagnostic(profile: EntropyProfile, floor: float = CONNECTED_RATIO_FLOOR):
    """Consecutive ratios e_{n+1}/e_n with a soft flag below ``floor``.

    A row is flagged when even the largest ratio compatible with the
    brackets, upper_{n+1} / lower_n, is below ``floor``.
    """
    if len(profile) < 2:
        raise RejectedInput("ratio_diagnostic needs at least 2 entries")
    rows = []
    for a, b in zip(profile.entries, profile.entries[1:]):
        cert = _ratio(b.upper, a.lower)
        flagged = a.upper > 0.0 and cert < floor
        rows.append(RatioRow(a.n, _ratio(b.upper, a.upper), _ratio(b.lower, a.lower),
                             cert, flagged))
    bad = [r.n for r in rows if r.flagged]
    if bad:
        warnings.warn(f"entropy ratio certified below {floor} at n={bad}; "
                      "inconsistent with a connected set", RatioWarning, stacklevel=2)
    return rows
