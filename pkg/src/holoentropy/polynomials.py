"""Homogeneous polynomials on C^N, their Jacobians and the corank of the
linear system that characterises polynomials functionally dependent on a
family.

For m-homogeneous p_1..p_r whose Jacobian has rank r, any m-homogeneous P
with rank J(p_1..p_r, P) = r satisfies, for j = r+1..N,

    Q dP/dz_j + sum_{i<=r} Q_ij dP/dz_i = 0,

where Q is the r x r minor on the first r variables and Q_ij is minus the
minor obtained from it by replacing column i with column j. Matching
coefficients turns this into a homogeneous linear system in the
coefficients of P; its corank is at most the number of degree-m monomials
in r variables.

Exact paths use :class:`~holoentropy.exact.QI` coefficients throughout;
only :func:`generic_rank` and :func:`coordinate_polynomials` work in
floating point.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exact import QI, bareiss_rank, format_scalar, nullspace, parse_scalar
from .metric import RejectedInput

MAX_NVARS, MAX_DEGREE, MAX_RANK = 10, 4, 3


class DegenerateFamilyError(RejectedInput):
    pass


class DependentFamilyError(RejectedInput):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class RankDeficiencyError(RejectedInput):
    pass


class ConditioningError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def lex_key(alpha):
    """Sort key for z_1 < z_2 < ... < z_N lexicographic order on monomials."""
    return tuple(reversed(alpha))


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple:
    """All exponent tuples of total degree ``degree``, in lex_key order."""
    if nvars == 0:
        return ((),) if degree == 0 else ()
    out = []
    for bars in itertools.combinations(range(degree + nvars - 1), nvars - 1):
        prev, alpha = -1, []
        for b in bars + (degree + nvars - 1,):
            alpha.append(b - prev - 1)
            prev = b
        out.append(tuple(alpha))
    return tuple(sorted(out, key=lex_key))


def n_monomials(nvars: int, degree: int) -> int:
    return math.comb(nvars + degree - 1, degree)


def _is_zero(c) -> bool:
    return not c


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """sum_gamma coeffs[gamma] z^gamma with every |gamma| == degree.

    Coefficients are either all :class:`QI` (exact) or all Python complex.
    """

    nvars: int
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for alpha, c in self.coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.nvars or any(a < 0 for a in alpha):
                raise RejectedInput(f"bad multi-index {alpha} for {self.nvars} variables")
            if sum(alpha) != self.degree:
                raise RejectedInput(f"monomial {alpha} is not of degree {self.degree}")
            if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
                c = QI(c)
            if not _is_zero(c):
                clean[alpha] = c
        object.__setattr__(self, "coeffs", clean)

    # construction helpers
    @classmethod
    def monomial(cls, alpha, coeff=1):
        alpha = tuple(alpha)
        return cls(len(alpha), sum(alpha), {alpha: coeff})

    @classmethod
    def zero(cls, nvars, degree):
        return cls(nvars, degree, {})

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, QI) for c in self.coeffs.values())

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self):
        return sorted(self.coeffs.items(), key=lambda t: lex_key(t[0]))

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        return (self.nvars == other.nvars and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.nvars, self.degree, frozenset(self.coeffs.items())))

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            raise RejectedInput("adding polynomials of different shape")
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out[a] + c if a in out else c
        return HomogeneousPolynomial(self.nvars, self.degree, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return HomogeneousPolynomial(self.nvars, self.degree,
                                     {a: v * c for a, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return self.scale(other)
        if self.nvars != other.nvars:
            raise RejectedInput("multiplying polynomials in different variables")
        out = {}
        for a, c in self.coeffs.items():
            for b, d in other.coeffs.items():
                g = tuple(x + y for x, y in zip(a, b))
                out[g] = out[g] + c * d if g in out else c * d
        return HomogeneousPolynomial(self.nvars, self.degree + other.degree, out)

    __rmul__ = scale

    def derivative(self, j: int) -> "HomogeneousPolynomial":
        """Partial derivative with respect to z_{j+1} (0-based ``j``)."""
        if self.degree == 0:
            raise RejectedInput("derivative of a constant has negative degree")
        out = {}
        for a, c in self.coeffs.items():
            if a[j]:
                b = a[:j] + (a[j] - 1,) + a[j + 1:]
                out[b] = c * a[j]
        return HomogeneousPolynomial(self.nvars, self.degree - 1, out)

    def permute(self, perm) -> "HomogeneousPolynomial":
        """Rename variables: new variable t is old variable ``perm[t]``."""
        return HomogeneousPolynomial(
            self.nvars, self.degree,
            {tuple(a[k] for k in perm): c for a, c in self.coeffs.items()})

    def coefficient(self, alpha):
        return self.coeffs.get(tuple(alpha), QI(0) if self.is_exact else 0j)

    def compiled(self):
        terms = self.terms()
        exps = np.array([a for a, _ in terms], dtype=np.int64).reshape(len(terms), self.nvars)
        coefs = np.array([complex(c) for _, c in terms], dtype=np.complex128)
        return exps, coefs

    def __call__(self, z):
        return evaluate(self, z)

    def __str__(self):
        return format_poly(self) if self.is_exact else repr(self)


def evaluate(P: HomogeneousPolynomial, z):
    """Value of P at a vector z, or at every row of a 2-D array."""
    z = np.asarray(z, dtype=np.complex128)
    single = z.ndim == 1
    Z = np.atleast_2d(z)
    if Z.shape[1] != P.nvars:
        raise RejectedInput(f"dimension mismatch: polynomial in {P.nvars} variables, "
                            f"point of dimension {Z.shape[1]}")
    exps, coefs = P.compiled()
    if exps.shape[0] == 0:
        vals = np.zeros(Z.shape[0], dtype=np.complex128)
    else:
        vals = np.prod(Z[:, None, :] ** exps[None, :, :], axis=2) @ coefs
    return complex(vals[0]) if single else vals


def euler_defect(P: HomogeneousPolynomial) -> HomogeneousPolynomial:
    """sum_j z_j dP/dz_j - m P (identically zero for homogeneous P)."""
    if P.degree == 0:
        return P.scale(0)
    total = P.scale(-P.degree)
    for j in range(P.nvars):
        e = tuple(int(k == j) for k in range(P.nvars))
        total = total + HomogeneousPolynomial.monomial(e, QI(1) if P.is_exact else 1 + 0j) * P.derivative(j)
    return total


# --------------------------------------------------------------------------
# text format:  coeff * z1^a1 z2^a2 ... zN^aN  joined by " + "

_VAR = re.compile(r"^z(\d+)(?:\^(\d+))?$")


def format_poly(P: HomogeneousPolynomial) -> str:
    if not P.is_exact:
        raise RejectedInput("only exact polynomials have a text form")
    if P.is_zero():
        return "0"
    parts = []
    for alpha, c in P.terms():
        mono = " ".join(f"z{k + 1}^{e}" for k, e in enumerate(alpha))
        parts.append(f"{format_scalar(c)} * {mono}" if mono else format_scalar(c))
    return " + ".join(parts)


def _split_terms(text: str):
    depth, start, out = 0, 0, []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "+" and depth == 0:
            # a sign directly after '*' or at a term start is not a separator
            before = text[start:i].strip()
            if before and not before.endswith("*"):
                out.append(before)
                start = i + 1
    out.append(text[start:].strip())
    return [t for t in out if t]


def parse_poly(text: str, nvars: int | None = None, degree: int | None = None):
    """Inverse of :func:`format_poly`; omitted variables have exponent 0."""
    text = text.strip()
    if text == "0":
        if nvars is None or degree is None:
            raise RejectedInput("the zero polynomial needs explicit nvars and degree")
        return HomogeneousPolynomial.zero(nvars, degree)
    raw = []
    for term in _split_terms(text):
        if "*" in term:
            coef_txt, mono_txt = term.split("*", 1)
        else:
            coef_txt, mono_txt = term, ""
        if coef_txt.strip().startswith("z"):
            coef_txt, mono_txt = "1", term
        exps = {}
        for tok in mono_txt.split():
            tok = tok.strip("*")
            if not tok:
                continue
            m = _VAR.match(tok)
            if not m:
                raise RejectedInput(f"bad factor {tok!r} in {term!r}")
            k = int(m.group(1))
            if k < 1:
                raise RejectedInput("variables are numbered from z1")
            exps[k] = exps.get(k, 0) + int(m.group(2) or 1)
        raw.append((parse_scalar(coef_txt), exps))
    n = nvars if nvars is not None else max([max(e, default=0) for _, e in raw] + [1])
    coeffs = {}
    for c, exps in raw:
        if any(k > n for k in exps):
            raise RejectedInput(f"variable index exceeds nvars={n}")
        alpha = tuple(exps.get(k + 1, 0) for k in range(n))
        coeffs[alpha] = coeffs[alpha] + c if alpha in coeffs else c
    degs = {sum(a) for a in coeffs}
    if len(degs) != 1:
        raise RejectedInput(f"terms of mixed degree {sorted(degs)}")
    deg = degs.pop()
    if degree is not None and degree != deg:
        raise RejectedInput(f"expected degree {degree}, found {deg}")
    return HomogeneousPolynomial(n, deg, coeffs)


# --------------------------------------------------------------------------
# Jacobians and minors

@dataclass(frozen=True)
class PolyMatrix:
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(r) for r in self.entries))

    @property
    def shape(self):
        return len(self.entries), (len(self.entries[0]) if self.entries else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def columns(self, cols):
        return PolyMatrix(tuple(tuple(row[c] for c in cols) for row in self.entries))


def _check_family(polys):
    if not polys:
        raise RejectedInput("empty polynomial family")
    n, m = polys[0].nvars, polys[0].degree
    if any(p.nvars != n or p.degree != m for p in polys):
        raise RejectedInput("family members must share nvars and degree")
    return n, m


def jacobian(polys) -> PolyMatrix:
    n, _ = _check_family(polys)
    return PolyMatrix(tuple(tuple(p.derivative(j) for j in range(n)) for p in polys))


def determinant(rows) -> HomogeneousPolynomial:
    """Fraction-free Laplace expansion along the first row."""
    k = len(rows)
    if k == 1:
        return rows[0][0]
    total = None
    for c in range(k):
        if rows[0][c].is_zero():
            continue
        sub = [row[:c] + row[c + 1:] for row in rows[1:]]
        term = rows[0][c] * determinant(sub)
        if c % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        a = rows[0][0]
        return HomogeneousPolynomial.zero(a.nvars, a.degree * k)
    return total


def poly_minor(J: PolyMatrix, rows, cols) -> HomogeneousPolynomial:
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols):
        raise RejectedInput("a minor needs a square selection")
    return determinant([tuple(J.entries[i][c] for c in cols) for i in rows])


def cofactor_q(J: PolyMatrix, i: int, j: int, r: int) -> HomogeneousPolynomial:
    """Q_ij: minus the leading r x r minor with column i replaced by column j.

    0-based ``i < r <= j``. With this sign, Q dP/dz_j + sum_i Q_ij dP/dz_i
    vanishes for every P in the functional span of the family.
    """
    cols = list(range(r))
    cols[i] = j
    return -poly_minor(J, range(r), cols)


# --------------------------------------------------------------------------
# the coefficient system

@dataclass(frozen=True)
class CoefficientSystem:
    nvars: int
    degree: int
    r: int
    rows: tuple            # (j, delta) with 0-based j in r..N-1 (permuted variables)
    cols: tuple            # gamma, |gamma| = degree (permuted variables)
    entries: dict          # (row, col) -> QI
    permutation: tuple     # new variable t is old variable permutation[t]

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def dense(self):
        m = [[QI(0)] * len(self.cols) for _ in self.rows]
        for (i, j), v in self.entries.items():
            m[i][j] = v
        return m

    def residual(self, P: HomogeneousPolynomial):
        """Row values of the system at P's coefficients (P in original variables)."""
        Pp = P.permute(self.permutation)
        vec = [Pp.coefficient(g) for g in self.cols]
        out = [QI(0)] * len(self.rows)
        for (i, j), v in self.entries.items():
            out[i] = out[i] + v * vec[j]
        return out

    def satisfied_by(self, P: HomogeneousPolynomial) -> bool:
        return not any(self.residual(P))


def nonzero_minor_columns(J: PolyMatrix, r: int):
    """First (in lexicographic order) column set whose r x r minor is nonzero."""
    _, n = J.shape
    for cols in itertools.combinations(range(n), r):
        if not poly_minor(J, range(r), cols).is_zero():
            return cols
    return None


def assemble_oxis(polys, N: int | None = None, m: int | None = None) -> CoefficientSystem:
    """Exact linear system for the coefficients P_gamma of m-homogeneous P.

    Variables are first permuted so that the leading r x r minor of the
    Jacobian is nonzero; the permutation is recorded on the result.
    """
    n, deg = _check_family(polys)
    if N is not None and N != n:
        raise RejectedInput(f"family lives in {n} variables, not {N}")
    if m is not None and m != deg:
        raise RejectedInput(f"family has degree {deg}, not {m}")
    if not all(p.is_exact for p in polys):
        raise RejectedInput("assemble_oxis needs exact coefficients")
    r = len(polys)
    if r > n:
        raise DegenerateFamilyError("more polynomials than variables cannot have maximal rank")
    cols_ok = nonzero_minor_columns(jacobian(polys), r)
    if cols_ok is None:
        raise DegenerateFamilyError("every r x r minor of the Jacobian vanishes identically")
    perm = tuple(cols_ok) + tuple(c for c in range(n) if c not in cols_ok)
    fam = [p.permute(perm) for p in polys]
    J = jacobian(fam)
    Q = poly_minor(J, range(r), range(r))

    D = r * (deg - 1) + deg - 1
    deltas = monomials(n, D)
    gammas = monomials(n, deg)
    rows = tuple((j, d) for j in range(r, n) for d in deltas)
    row_index = {rw: k for k, rw in enumerate(rows)}
    entries: dict = {}

    def add(j, poly, var, col, gamma):
        # contribution of poly * d(z^gamma)/dz_var to the rows of equation j
        g = gamma[var]
        if not g:
            return
        shifted = gamma[:var] + (g - 1,) + gamma[var + 1:]
        for alpha, c in poly.coeffs.items():
            delta = tuple(a + b for a, b in zip(alpha, shifted))
            key = (row_index[(j, delta)], col)
            v = c * g
            entries[key] = entries[key] + v if key in entries else v

    for j in range(r, n):
        qij = [cofactor_q(J, i, j, r) for i in range(r)]
        for col, gamma in enumerate(gammas):
            add(j, Q, j, col, gamma)
            for i in range(r):
                add(j, qij[i], i, col, gamma)
    entries = {k: v for k, v in entries.items() if v}
    return CoefficientSystem(n, deg, r, rows, gammas, entries, perm)


def corank(system: CoefficientSystem) -> int:
    """Dimension of the solution space, by exact fraction-free elimination."""
    ncols = len(system.cols)
    if not system.rows:
        return ncols
    return ncols - bareiss_rank(system.dense())


def corank_bounds(r: int, m: int) -> dict:
    """The three binomials attached to the corank bound.

    ``monomial_count`` = C(m+r-1, r-1) is the bound that is implemented;
    the other two are reported for comparison.
    """
    return {
        "monomial_count": math.comb(m + r - 1, r - 1),
        "statement_binomial": math.comb(r + m - 2, m - 2) if m >= 2 else 0,
        "proof_binomial": math.comb(r + m - 1, m - 1),
    }


# --------------------------------------------------------------------------
# numerical rank and the rank lower bound

def jacobian_at(polys, Z: np.ndarray) -> np.ndarray:
    """Numeric Jacobians at every row of Z, shape (len(Z), r, N)."""
    n, _ = _check_family(polys)
    Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    out = np.empty((Z.shape[0], len(polys), n), dtype=np.complex128)
    for i, p in enumerate(polys):
        for j in range(n):
            out[:, i, j] = evaluate(p.derivative(j), Z)
    return out


def numerical_rank(A: np.ndarray, tol: float = 1e-9) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def generic_rank(polys, trials: int = 5, seed: int = 0, tol: float = 1e-9) -> int:
    """Max numerical Jacobian rank over ``trials`` seeded random points."""
    if trials < 1:
        raise RejectedInput("trials must be >= 1")
    n, _ = _check_family(polys)
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))
    return max(numerical_rank(J, tol) for J in jacobian_at(polys, Z))


def coefficient_matrix(polys):
    n, m = _check_family(polys)
    mons = monomials(n, m)
    return [[p.coefficient(a) for a in mons] for p in polys]


@dataclass(frozen=True)
class CorollaryResult:
    N: int
    m: int
    rank: int
    bound: float
    passed: bool
    monomial_count: int
    chain_ok: bool


def corollary_check(family, trials: int = 5, seed: int = 0, tol: float = 1e-9) -> CorollaryResult:
    """Check rank J >= N^{1/m} - m for N linearly independent m-homogeneous polys.

    Also re-derives the bound arithmetically: N <= C(m+r-1, r-1) <= (r+m)^m.
    """
    N = len(family)
    _, m = _check_family(family)
    M = coefficient_matrix(family)
    if bareiss_rank(M) < N:
        transposed = [list(col) for col in zip(*M)]
        cert = nullspace(transposed)[0]
        raise DependentFamilyError("family is linearly dependent", certificate=cert)
    rank = generic_rank(family, trials, seed, tol)
    bound = N ** (1.0 / m) - m
    count = math.comb(m + rank - 1, rank - 1) if rank >= 1 else 0
    chain_ok = N <= count <= (rank + m) ** m
    return CorollaryResult(N, m, rank, bound, rank >= bound, count, chain_ok)


# --------------------------------------------------------------------------
# coordinate polynomials of a black-box homogeneous map

def _character_grid(N: int, m: int):
    """Points (1, w^k_2, ..., w^k_N), w = exp(2 pi i/(m+1)), over all k."""
    w = np.exp(2j * np.pi / (m + 1))
    ks = np.array(list(itertools.product(range(m + 1), repeat=N - 1)), dtype=np.int64)
    ks = ks.reshape(-1, N - 1)
    pts = np.concatenate([np.ones((ks.shape[0], 1)), w ** ks], axis=1)
    return pts


def coordinate_polynomials(P, xs, m: int, projection=None, max_grid: int = 4096,
                           seed: int = 0, coef_tol: float = 1e-12):
    """Recover p_1..p_N with R P(sum a_i x_i) = sum_j p_j(a) P(x_j).

    ``P`` maps a vector of E to a vector of F. ``projection``, if given,
    maps a vector of F to its coordinates in the basis P(x_1)..P(x_N);
    the default is least squares onto their span. Samples lie on the torus
    of (m+1)-th roots of unity (first coordinate fixed to 1), where the
    degree-m monomials are orthogonal; larger grids are subsampled.
    """
    xs = np.asarray(xs, dtype=np.complex128)
    N = xs.shape[0]
    images = np.stack([np.asarray(P(x), dtype=np.complex128) for x in xs], axis=1)
    if numerical_rank(images) < N:
        raise RankDeficiencyError("the images P(x_j) are linearly dependent")
    if projection is None:
        pinv = np.linalg.pinv(images)

        def projection(y):
            return pinv @ y

    mons = monomials(N, m)
    exps = np.array(mons, dtype=np.int64)
    grid = _character_grid(N, m)
    if grid.shape[0] > max_grid:
        rng = np.random.default_rng(seed)
        take = rng.choice(grid.shape[0], size=min(grid.shape[0], 4 * len(mons)), replace=False)
        grid = grid[np.sort(take)]
    V = np.prod(grid[:, None, :] ** exps[None, :, :], axis=2)
    cond = np.linalg.cond(V)
    if not cond < 1e10:
        raise ConditioningError(f"interpolation matrix condition number {cond:.3g}")
    # stay inside the l1 unit ball of coefficient space, undo by homogeneity
    scale = float(N)
    values = np.stack([projection(P((a / scale) @ xs)) for a in grid]) * scale ** m
    coef, *_ = np.linalg.lstsq(V, values, rcond=None)
    resid = np.abs(V @ coef - values).max() / max(np.abs(values).max(), 1e-300)
    if resid > 1e-8:
        raise ConditioningError(f"interpolation residual {resid:.3g}", residual=resid)
    cutoff = coef_tol * max(np.abs(coef).max(), 1e-300)
    out = []
    for j in range(N):
        out.append(HomogeneousPolynomial(N, m, {
            a: complex(c) for a, c in zip(mons, coef[:, j]) if abs(c) > cutoff}))
    return out


def rationalize(P: HomogeneousPolynomial, max_denominator: int = 10 ** 6,
                tol: float = 1e-9) -> HomogeneousPolynomial:
    """Snap floating coefficients to nearby Gaussian rationals."""
    out = {}
    for a, c in P.coeffs.items():
        q = QI.from_complex(c, max_denominator)
        if abs(complex(q) - complex(c)) > tol * max(1.0, abs(c)):
            raise ConditioningError(f"coefficient {c} has no close rational")
        out[a] = q
    return HomogeneousPolynomial(P.nvars, P.degree, out)
