"""Box-counting dimension over dyadic scales and the entropy/dimension bridge."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .covering import EntropyProfile
from .metric import PointCloud, RejectedInput


class SaturationWarning(UserWarning):
    """Box counts stopped growing: the sample is too coarse for the scale."""


def real_coordinates(cloud: PointCloud) -> np.ndarray:
    """Points of C^d as points of R^{2d} (real parts, then imaginary parts)."""
    pts = cloud.points
    return np.concatenate([pts.real, pts.imag], axis=1)


def _count_cells(x: np.ndarray, delta: float) -> int:
    cells = np.floor(x / delta).astype(np.int64)
    if cells.shape[1] == 0:
        return 1
    cells -= cells.min(axis=0)
    spans = cells.max(axis=0) + 1
    if np.sum(np.log2(spans.astype(float))) < 62:
        # mixed-radix code per cell; 1-D unique is much faster than unique rows
        code = np.zeros(cells.shape[0], dtype=np.int64)
        for k in range(cells.shape[1]):
            code = code * spans[k] + cells[:, k]
        return int(np.unique(code).size)
    return int(np.unique(cells, axis=0).shape[0])


def box_count(cloud: PointCloud, delta: float, offsets: bool = False) -> int:
    """Number of cells of the origin-anchored grid of side ``delta`` meeting the cloud.

    With ``offsets=True`` the grid is also shifted by delta/2 along every
    subset of the 2d real axes and the largest count is returned.
    """
    if not delta > 0:
        raise RejectedInput("delta must be positive")
    if len(cloud) == 0:
        return 0
    x = real_coordinates(cloud)
    if not offsets:
        return _count_cells(x, delta)
    best = 0
    for shift in itertools.product((0.0, 0.5 * delta), repeat=x.shape[1]):
        best = max(best, _count_cells(x + np.asarray(shift), delta))
    return best


@dataclass(frozen=True)
class DimensionEstimate:
    """Box counts at scales 2^-n with derived slope estimates.

    ``ratios`` holds log N / (-log delta) per scale, ``local_slopes`` the
    two-scale slopes log(N_{k+1}/N_k) / log 2, and ``slope`` the least-squares
    slope of log N against -log delta over the whole window. ``lower_est`` and
    ``upper_est`` are the min and max local slope over the last three scales.
    """

    scales: tuple
    ratios: tuple
    local_slopes: tuple
    slope: float
    lower_est: float
    upper_est: float
    saturated: bool = False

    @property
    def slope_table(self):
        return list(zip([d for d, _ in self.scales], self.ratios,
                        (math.nan,) + self.local_slopes))


def dim_estimate(cloud: PointCloud, n_min: int, n_max: int, offsets: bool = False,
                 tail: int = 3) -> DimensionEstimate:
    if not n_min < n_max:
        raise RejectedInput("need n_min < n_max")
    ns = np.arange(n_min, n_max + 1)
    deltas = 2.0 ** -ns.astype(float)
    counts = np.array([box_count(cloud, d, offsets) for d in deltas])
    logn = np.log(counts)
    ratios = logn / (ns * math.log(2.0))
    local = np.diff(logn) / math.log(2.0)
    slope = float(np.polyfit(ns * math.log(2.0), logn, 1)[0]) if counts[-1] > 1 else 0.0
    window = local[-tail:] if local.size else np.zeros(1)
    lower_est, upper_est = float(window.min()), float(window.max())

    saturated = False
    if counts[-1] > 1:
        stalled = np.any((counts[1:] <= counts[:-1]) & (counts[:-1] > 1))
        exhausted = counts[-1] > len(cloud) / 2
        if stalled or exhausted:
            saturated = True
            warnings.warn(f"box counts saturate at delta=2^-{n_max} "
                          f"(N={counts[-1]}, cloud size {len(cloud)})",
                          SaturationWarning, stacklevel=2)
    return DimensionEstimate(
        scales=tuple(zip(deltas.tolist(), counts.tolist())),
        ratios=tuple(ratios.tolist()),
        local_slopes=tuple(local.tolist()),
        slope=slope, lower_est=lower_est, upper_est=upper_est, saturated=saturated)


@dataclass(frozen=True)
class BridgeResult:
    classification: str
    upper_rate: float
    lower_rate: float
    upper_roots: tuple
    lower_roots: tuple


def _extrapolated_rate(ns: np.ndarray, values: np.ndarray) -> float:
    """Estimate of lim e_n^{1/n} from a tail of a profile.

    Fits log e_n = a + b n (+ c sqrt(n) when the tail has at least six
    points) and returns exp(b). The constant a is what keeps the raw root
    e_n^{1/n} away from its limit at small n; the sqrt term absorbs the
    stretched-exponential decay that separates infinite-dimensional sets.
    """
    if np.any(values <= 0.0):
        return 0.0
    n = ns.astype(float)
    cols = [np.ones_like(n), n]
    if n.size >= 6:
        cols.append(np.sqrt(n))
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), np.log(values), rcond=None)
    return float(math.exp(coef[1]))


def entropy_dim_bridge(profile: EntropyProfile, threshold: float = 0.95,
                       tail_fraction: float = 0.5) -> BridgeResult:
    """Classify a profile as consistent with finite or infinite box dimension.

    Finite upper box dimension of a connected set is equivalent to
    limsup e_n^{1/n} < 1. The limit rate is extrapolated separately from the
    upper and the lower bounds over the tail; ``finite-dim-consistent`` when
    the upper-bound rate is <= threshold, ``infinite-dim-consistent`` when
    the lower-bound rate is >= threshold, otherwise ``inconclusive``.
    """
    if len(profile) < 4:
        raise RejectedInput("entropy_dim_bridge needs at least 4 entries")
    ns, lo, up = profile.n, profile.lower, profile.upper
    k = max(4, int(math.ceil(tail_fraction * len(profile))))
    ns, lo, up = ns[-k:], lo[-k:], up[-k:]
    upper_rate = _extrapolated_rate(ns, up)
    lower_rate = _extrapolated_rate(ns, lo)
    finite = upper_rate <= threshold
    infinite = lower_rate >= threshold
    if finite and not infinite:
        label = "finite-dim-consistent"
    elif infinite and not finite:
        label = "infinite-dim-consistent"
    else:
        label = "inconclusive"
    return BridgeResult(label, upper_rate, lower_rate,
                        tuple((up ** (1.0 / ns)).tolist()),
                        tuple((lo ** (1.0 / ns)).tolist()))
