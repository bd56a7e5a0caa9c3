"""Taylor parts of black-box holomorphic maps and the transfer of nets from
the image of a ball to the images of the Taylor parts.

The m-th Taylor part at x0 is the circle integral

    P_m f(x0)(x) = (1/2pi) int_0^{2pi} f(x0 + e^{it} x) e^{-imt} dt,

computed with the trapezoidal rule, which is exact for trigonometric
polynomials of degree below the node count.

Given a net M of f(x0 + B) at radius e and a bound C on the Lipschitz
constant of t -> f(x0 + e^{it} x), split [0, 2pi] into
C_n = ceil(2 pi C / e) arcs, pick for each arc the net point nearest to f at
the arc midpoint, and integrate those constants against e^{-imt}. The result
is within 2e of P_m f(x0)(x). The full net of all such combinations has
|M|^{C_n} points and is never built; witnesses are produced per x instead.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .covering import Cover, EntropyProfile, nearest_center
from .metric import BallSpec, PointCloud, RejectedInput, norm, sample_ball

MAX_NODES = 2 ** 16
QUADRATURE_TOL = 1e-12


class DomainError(RejectedInput):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, delta):
        super().__init__(message)
        self.delta = delta


class LipschitzWarning(UserWarning):
    pass


@dataclass(frozen=True)
class HoloSampler:
    """A holomorphic map sampled on the ball of ``radius`` around ``center``.

    ``fn`` takes an (n, d_in) array of absolute points and returns (n, d_out).
    ``deriv_bound`` bounds the Lipschitz constant of t -> f(x0 + e^{it} x)
    with respect to |e^{it0} - e^{it1}|, uniformly over the ball.
    """

    fn: Callable
    center: np.ndarray
    radius: float
    deriv_bound: float
    codomain_p: float = math.inf
    domain_p: float = math.inf
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=np.complex128)))
        if not self.radius > 0:
            raise RejectedInput("radius must be positive")
        if not self.deriv_bound > 0:
            raise RejectedInput("deriv_bound must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    def evaluate(self, x):
        """f(x0 + x) for a displacement x (1-D) or a batch of them (2-D)."""
        x = np.asarray(x, dtype=np.complex128)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        out = np.asarray(self.fn(self.center[None, :] + X), dtype=np.complex128)
        return out[0] if single else out

    def on_circle(self, X: np.ndarray, t: np.ndarray) -> np.ndarray:
        """f(x0 + e^{it} x) for every x in X and t in t, shape (len(X), len(t), d_out)."""
        k, d = X.shape
        pts = (np.exp(1j * t)[None, :, None] * X[:, None, :]).reshape(-1, d)
        vals = self.evaluate(pts)
        return vals.reshape(k, t.size, -1)


# --------------------------------------------------------------------------
# built-in samplers

def _coef_lipschitz(degrees, coefs, r, p):
    # |d/dt c x^k e^{ikt}| = k |c| |x|^k, and |e^{ik s} - 1| <= k |e^{is} - 1|
    return float(norm(np.asarray(degrees) * np.abs(coefs) * r ** np.asarray(degrees, dtype=float), p))


def power_curve(d: int = 8, radius: float = 1.0, p: float = math.inf) -> HoloSampler:
    """z -> (z, z^2, ..., z^d) on the disc of the given radius."""
    ks = np.arange(1, d + 1)

    def fn(Z):
        return Z[:, :1] ** ks[None, :]

    return HoloSampler(fn, np.zeros(1), radius, _coef_lipschitz(ks, np.ones(d), radius, p),
                       p, 2.0, f"power-curve(d={d})")


def entire_exp(terms: int = 8, radius: float = 1.0, p: float = math.inf) -> HoloSampler:
    """z -> (z, z^2/2!, ..., z^terms/terms!)."""
    ks = np.arange(1, terms + 1)
    inv_fact = np.array([1.0 / math.factorial(k) for k in ks])

    def fn(Z):
        return Z[:, :1] ** ks[None, :] * inv_fact[None, :]

    return HoloSampler(fn, np.zeros(1), radius, _coef_lipschitz(ks, inv_fact, radius, p),
                       p, 2.0, f"entire-exp(terms={terms})")


def coordinate_powers(d: int = 8, radius: float = 0.5, p: float = math.inf) -> HoloSampler:
    """(x_1, ..., x_d) -> (x_1, x_2^2, ..., x_d^d) on the sup-norm ball."""
    ks = np.arange(1, d + 1)

    def fn(Z):
        return Z ** ks[None, :]

    return HoloSampler(fn, np.zeros(d), radius, _coef_lipschitz(ks, np.ones(d), radius, p),
                       p, math.inf, f"coordinate-powers(d={d})")


def sigma_powers(N_max: int = 3, radius: float = 0.5, p: float = math.inf) -> HoloSampler:
    """x_j -> x_j^N for j in the N-th block of sizes 1!, 2!, ..., N_max!."""
    ks = np.concatenate([np.full(math.factorial(N), N) for N in range(1, N_max + 1)])

    def fn(Z):
        return Z ** ks[None, :]

    return HoloSampler(fn, np.zeros(ks.size), radius,
                       _coef_lipschitz(ks, np.ones(ks.size), radius, p),
                       p, math.inf, f"sigma-powers(N_max={N_max})")


SAMPLERS = {
    "power-curve": power_curve,
    "entire-exp": entire_exp,
    "coordinate-powers": coordinate_powers,
    "sigma-powers": sigma_powers,
}


def make_sampler(name: str, **params) -> HoloSampler:
    try:
        factory = SAMPLERS[name]
    except KeyError:
        raise RejectedInput(f"unknown sampler {name!r}; choose from {sorted(SAMPLERS)}") from None
    return factory(**params)


# --------------------------------------------------------------------------
# Taylor parts

def _check_inside(f: HoloSampler, X: np.ndarray):
    r = norm(X, f.domain_p, axis=1)
    if np.any(r >= f.radius):
        raise DomainError(f"|x| = {r.max():.6g} is not inside the radius {f.radius}")


def taylor_coefficients(f: HoloSampler, m: int, X, nodes: int = 16,
                        tol: float = QUADRATURE_TOL, max_nodes: int = MAX_NODES):
    """P_m f(x0)(x) for every row x of X, by trapezoidal quadrature with doubling.

    Nodes are doubled until two successive results differ by less than
    ``tol`` in the codomain norm. Returns ``(values, nodes_used, last_delta)``.
    """
    if m < 0:
        raise RejectedInput("m must be >= 0")
    X = np.atleast_2d(np.asarray(X, dtype=np.complex128))
    _check_inside(f, X)
    K = max(int(nodes), m + 2)
    t = 2.0 * np.pi * np.arange(K) / K
    S = np.einsum("ktd,t->kd", f.on_circle(X, t), np.exp(-1j * m * t))
    est = S / K
    while True:
        if 2 * K > max_nodes:
            raise ConvergenceError(f"quadrature did not converge with {K} nodes "
                                   f"(last delta {delta:.3g})", delta)
        t = 2.0 * np.pi * (np.arange(K) + 0.5) / K
        S = S + np.einsum("ktd,t->kd", f.on_circle(X, t), np.exp(-1j * m * t))
        K *= 2
        new = S / K
        delta = float(norm(new - est, f.codomain_p, axis=1).max())
        est = new
        if delta < tol:
            return est, K, delta


def taylor_coefficient(f: HoloSampler, m: int, x, nodes: int = 16) -> np.ndarray:
    """The m-homogeneous Taylor part of f at its center, evaluated at x."""
    vals, _, _ = taylor_coefficients(f, m, np.asarray(x, dtype=np.complex128)[None, :], nodes)
    return vals[0]


def image_cloud(f: HoloSampler, count: int, seed: int = 0,
                radius: float | None = None) -> PointCloud:
    """f evaluated on a seeded sample of the (closed) ball of ``radius``."""
    r = f.radius if radius is None else radius
    ball = sample_ball(BallSpec(np.zeros(f.dim), r, f.domain_p), count, seed)
    return PointCloud(f.evaluate(ball.points), f.codomain_p, f"image of {f.name}")


# --------------------------------------------------------------------------
# the net transfer

@dataclass(frozen=True)
class TransferPlan:
    n: int
    C_n: int
    target_index: int
    guarantee: float
    net: Cover | None = None


def arc_count(e_n: float, deriv_bound: float) -> int:
    return max(1, math.ceil(2.0 * math.pi * deriv_bound / e_n))


def transfer_entropy_bound(n: int, e_n_upper: float, deriv_bound: float) -> TransferPlan:
    """Index and bound: e_{(n-1)C_n+1}(P_m f(x0)(B)) <= 2 e_n(f(x0 + B))."""
    if not e_n_upper > 0:
        raise RejectedInput("e_n_upper must be positive")
    if n < 1:
        raise RejectedInput("n must be >= 1")
    C = arc_count(e_n_upper, deriv_bound)
    return TransferPlan(n, C, (n - 1) * C + 1, 2.0 * e_n_upper)


def plan_from_net(net: Cover, deriv_bound: float) -> TransferPlan:
    """Plan for a concrete net; n is the least index with 2^{n-1} >= |net|."""
    if len(net) == 0:
        raise RejectedInput("empty net")
    n = 1 + max(0, math.ceil(math.log2(len(net))))
    plan = transfer_entropy_bound(n, net.radius, deriv_bound)
    return TransferPlan(plan.n, plan.C_n, plan.target_index, plan.guarantee, net)


def arc_weights(C_n: int, m: int) -> np.ndarray:
    """(1/2pi) int over each of the C_n equal arcs of e^{-imt} dt."""
    a = 2.0 * np.pi * np.arange(C_n) / C_n
    b = 2.0 * np.pi * np.arange(1, C_n + 1) / C_n
    if m == 0:
        return (b - a) / (2.0 * np.pi) + 0j
    return (np.exp(-1j * m * a) - np.exp(-1j * m * b)) / (2j * np.pi * m)


@dataclass(frozen=True)
class Witness:
    y: np.ndarray
    error: float
    passed: bool


def selected_net_points(f: HoloSampler, plan: TransferPlan, X) -> np.ndarray:
    """z_j for every row x of X: the net center nearest to f at each arc midpoint.

    Shape (len(X), C_n, d_out). The choice does not depend on m.
    """
    if plan.net is None or len(plan.net) == 0:
        raise RejectedInput("the plan carries no net")
    X = np.atleast_2d(np.asarray(X, dtype=np.complex128))
    _check_inside(f, X)
    C = plan.C_n
    mid = 2.0 * np.pi * (np.arange(C) + 0.5) / C
    vals = f.on_circle(X, mid)
    k, _, d_out = vals.shape
    idx, _ = nearest_center(vals.reshape(-1, d_out), plan.net.centers, plan.net.p)
    return plan.net.centers[idx].reshape(k, C, d_out)


def transfer_witness_table(f: HoloSampler, plan: TransferPlan, ms, X) -> dict:
    """Witnesses for every m in ``ms`` and every row of X, sharing the net selection."""
    X = np.atleast_2d(np.asarray(X, dtype=np.complex128))
    Z = selected_net_points(f, plan, X)
    table = {}
    for m in ms:
        Y = np.einsum("kcd,c->kd", Z, arc_weights(plan.C_n, m))
        exact, _, _ = taylor_coefficients(f, m, X)
        err = norm(Y - exact, f.codomain_p, axis=1)
        table[m] = [Witness(Y[i], float(err[i]), bool(err[i] <= plan.guarantee))
                    for i in range(X.shape[0])]
    return table


def transfer_witnesses(f: HoloSampler, plan: TransferPlan, m: int, X) -> list:
    """Net-built approximations of P_m f(x0)(x) for every row of X."""
    return transfer_witness_table(f, plan, [m], X)[m]


def transfer_witness(f: HoloSampler, plan: TransferPlan, m: int, x) -> Witness:
    return transfer_witnesses(f, plan, m, np.asarray(x, dtype=np.complex128)[None, :])[0]


def lipschitz_probe(f: HoloSampler, samples: int = 1000, seed: int = 0,
                    shell: float = 1.0 - 1e-9) -> float:
    """Empirical lower estimate of the circle Lipschitz constant of f.

    Points sit on the sphere of radius ``shell * f.radius``; half the angle
    pairs are spread over the circle, half are close together.
    """
    if samples < 2:
        raise RejectedInput("samples must be >= 2")
    rng = np.random.default_rng(seed)
    X = sample_ball(BallSpec(np.zeros(f.dim), 1.0, f.domain_p), samples, seed).points
    r = norm(X, f.domain_p, axis=1)
    X = X[r > 0] / r[r > 0, None] * (shell * f.radius)
    k = X.shape[0]
    t0 = rng.uniform(0.0, 2.0 * np.pi, k)
    gap = np.where(np.arange(k) % 2 == 0, rng.uniform(-np.pi, np.pi, k),
                   rng.uniform(-1e-3, 1e-3, k))
    t1 = t0 + gap
    a = f.evaluate(np.exp(1j * t0)[:, None] * X)
    b = f.evaluate(np.exp(1j * t1)[:, None] * X)
    chord = np.abs(np.exp(1j * t0) - np.exp(1j * t1))
    ok = chord > 0
    probe = float((norm(a - b, f.codomain_p, axis=1)[ok] / chord[ok]).max(initial=0.0))
    if probe > f.deriv_bound * (1.0 + 1e-9):
        warnings.warn(f"probed Lipschitz constant {probe:.6g} exceeds deriv_bound "
                      f"{f.deriv_bound:.6g}", LipschitzWarning, stacklevel=2)
    return probe


# --------------------------------------------------------------------------
# summability

@dataclass(frozen=True)
class SummabilityReport:
    p: float
    partial_sums: tuple
    lower_partial_sums: tuple
    ratio_tail: float
    verdict: str


def summability_diagnostic(profile: EntropyProfile, p: float, weights=None,
                           window: int = 5, ratio_threshold: float = 0.99) -> SummabilityReport:
    """Partial sums of w_n upper_n^p and a tail-ratio verdict.

    ``weights`` gives how many consecutive indices each entry stands for
    (all ones for a dense profile). ``summable-consistent`` when the last
    ``window`` ratios of consecutive upper terms stay below
    ``ratio_threshold``; never for p = 1, where summability is an open
    question. ``divergent-consistent`` when the lower terms are
    nondecreasing and positive over the same window.
    """
    if len(profile) == 0:
        raise RejectedInput("empty profile")
    if p < 1:
        raise RejectedInput("p must be >= 1")
    w = np.ones(len(profile)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (len(profile),):
        raise RejectedInput("one weight per profile entry")
    up = w * profile.upper ** p
    lo = w * profile.lower ** p
    tail_up = up[-(window + 1):]
    tail_lo = lo[-(window + 1):]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(tail_up[:-1] > 0, tail_up[1:] / tail_up[:-1], 0.0)
    ratio_tail = float(ratios.max()) if ratios.size else 0.0
    diverging = (tail_lo.size >= 2 and np.all(tail_lo > 0)
                 and np.all(np.diff(tail_lo) >= 0))
    if diverging:
        verdict = "divergent-consistent"
    elif p > 1 and ratio_tail < ratio_threshold and (ratios.size or up[-1] == 0):
        verdict = "summable-consistent"
    else:
        verdict = "inconclusive"
    return SummabilityReport(p, tuple(np.cumsum(up).tolist()), tuple(np.cumsum(lo).tolist()),
                             ratio_tail, verdict)
