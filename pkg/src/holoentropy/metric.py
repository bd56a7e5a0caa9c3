"""Finite-dimensional complex l_p spaces: norms, distances, balls and point clouds.

Vectors are numpy ``complex128`` arrays. A norm is identified by its exponent
``p`` (a float >= 1 or ``math.inf``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class RejectedInput(ValueError):
    """Raised when an argument violates an operation's precondition."""


def check_norm(p) -> float:
    p = float(p)
    if not (p >= 1.0):
        raise RejectedInput(f"norm exponent must be >= 1 or inf, got {p}")
    return p


def as_vector(x) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    if v.ndim != 1 or v.size == 0:
        raise RejectedInput("a vector must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(v)):
        raise RejectedInput("vector entries must be finite")
    return v


def norm(x, p=2.0, axis=-1):
    """l_p norm of a complex vector (or of each row of a 2-D array)."""
    a = np.abs(np.asarray(x, dtype=np.complex128))
    p = check_norm(p)
    if math.isinf(p):
        return a.max(axis=axis, initial=0.0)
    if p == 1.0:
        return a.sum(axis=axis)
    if p == 2.0:
        return np.sqrt((a * a).sum(axis=axis))
    return (a ** p).sum(axis=axis) ** (1.0 / p)


def distance(x, y, p=2.0) -> float:
    x, y = as_vector(x), as_vector(y)
    if x.shape != y.shape:
        raise RejectedInput(f"dimension mismatch: {x.size} vs {y.size}")
    return float(norm(x - y, p))


def distances_to(points: np.ndarray, y: np.ndarray, p) -> np.ndarray:
    """Distances from every row of ``points`` to the vector ``y``."""
    return norm(points - y[None, :], p, axis=1)


def pairwise_distances(a: np.ndarray, b: np.ndarray, p) -> np.ndarray:
    return norm(a[:, None, :] - b[None, :, :], p, axis=2)


@dataclass(frozen=True)
class PointCloud:
    """A finite sample of vectors of C^d standing in for a bounded set."""

    points: np.ndarray
    p: float = 2.0
    label: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise RejectedInput("points must form an (n, d) array")
        if not np.all(np.isfinite(pts)):
            raise RejectedInput("point coordinates must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "p", check_norm(self.p))

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def subset(self, idx, label=None) -> "PointCloud":
        return PointCloud(self.points[np.asarray(idx, dtype=int)], self.p,
                          self.label if label is None else label)

    def diameter(self) -> float:
        """Exact for small clouds; for large ones an upper bound within a factor 2."""
        n = len(self)
        if n <= 1:
            return 0.0
        if n <= 2048:
            return float(pairwise_distances(self.points, self.points, self.p).max())
        # max distance from one point is within a factor 2 of the diameter
        return 2.0 * float(distances_to(self.points, self.points[0], self.p).max())


@dataclass(frozen=True)
class BallSpec:
    center: np.ndarray
    radius: float
    p: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise RejectedInput("ball radius must be a positive finite real")
        object.__setattr__(self, "p", check_norm(self.p))

    @property
    def dim(self) -> int:
        return self.center.size


def _uniform_disc(rng, shape, radius):
    r = radius * np.sqrt(rng.random(shape))
    theta = 2.0 * np.pi * rng.random(shape)
    return r * np.exp(1j * theta)


def sample_ball(spec: BallSpec, count: int, seed: int = 0) -> PointCloud:
    """Seeded sample of the closed ball.

    Each coordinate is drawn uniformly from the disc of radius ``spec.radius``
    (the circumscribing polydisc) and draws outside the l_p ball are rejected;
    for p = inf nothing is rejected.
    """
    if count < 1:
        raise RejectedInput("count must be >= 1")
    rng = np.random.default_rng(seed)
    d = spec.dim
    out = []
    have = 0
    while have < count:
        batch = _uniform_disc(rng, (max(2 * (count - have), 64), d), spec.radius)
        if not math.isinf(spec.p):
            batch = batch[norm(batch, spec.p, axis=1) <= spec.radius]
        out.append(batch)
        have += batch.shape[0]
    pts = np.concatenate(out)[:count] + spec.center[None, :]
    return PointCloud(pts, spec.p, f"ball(r={spec.radius:g}, p={spec.p:g}, d={d})")


def sample_polydisc(radii, count: int, seed: int = 0, p=math.inf) -> PointCloud:
    """Uniform sample of the product of discs with the given radii."""
    radii = np.asarray(radii, dtype=float)
    rng = np.random.default_rng(seed)
    pts = _uniform_disc(rng, (count, radii.size), 1.0) * radii[None, :]
    return PointCloud(pts, p, f"polydisc(d={radii.size})")


def grid_segment(a: float, b: float, count: int) -> PointCloud:
    """Equispaced real points of [a, b] embedded in C^1."""
    if not a < b:
        raise RejectedInput("grid_segment needs a < b")
    if count < 2:
        raise RejectedInput("grid_segment needs count >= 2")
    pts = np.linspace(a, b, count).astype(np.complex128)
    return PointCloud(pts[:, None], 2.0, f"segment[{a:g},{b:g}]x{count}")
