"""Exact Gaussian-rational scalars and fraction-free linear algebra over Q(i)."""
from __future__ import annotations

import re
from fractions import Fraction


class QI:
    """An exact complex number re + im*i with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QI):
            if im:
                raise TypeError("QI(QI, im) is ambiguous")
            self.re, self.im = re.re, re.im
            return
        if isinstance(re, complex) or isinstance(re, float) or isinstance(im, float):
            raise TypeError("use QI.from_complex for floating point input")
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")

    @classmethod
    def from_complex(cls, z, max_denominator: int | None = None) -> "QI":
        z = complex(z)
        re, im = Fraction(z.real), Fraction(z.imag)
        if max_denominator is not None:
            re, im = re.limit_denominator(max_denominator), im.limit_denominator(max_denominator)
        return cls(re, im)

    def __add__(self, o):
        try:
            o = QI.coerce(o)
        except TypeError:
            return NotImplemented
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, o):
        try:
            o = QI.coerce(o)
        except TypeError:
            return NotImplemented
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return QI.coerce(o) - self

    def __mul__(self, o):
        try:
            o = QI.coerce(o)
        except TypeError:
            return NotImplemented
        if o.im == 0 and self.im == 0:
            return QI(self.re * o.re)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = QI.coerce(o)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("QI division by zero")
        if o.im == 0:
            return QI(self.re / o.re, self.im / o.re)
        return QI((self.re * o.re + self.im * o.im) / den,
                  (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, o):
        return QI.coerce(o) / self

    def __pow__(self, k: int):
        out = QI(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        if isinstance(o, QI):
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return QI(self.re, -self.im)

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(c: QI) -> str:
    """``p/q`` for rationals, ``(a+bi)`` / ``(a-bi)`` otherwise."""
    if c.im == 0:
        return _frac(c.re)
    sign = "-" if c.im < 0 else "+"
    return f"({_frac(c.re)}{sign}{_frac(abs(c.im))}i)"


_RAT = r"[+-]?\d+(?:/\d+)?"
_GAUSS = re.compile(rf"^\(\s*({_RAT})\s*([+-])\s*(\d+(?:/\d+)?)\s*i\s*\)$")


def parse_scalar(text: str) -> QI:
    text = text.strip()
    m = _GAUSS.match(text)
    if m:
        im = Fraction(m.group(3))
        return QI(Fraction(m.group(1)), -im if m.group(2) == "-" else im)
    if re.fullmatch(_RAT, text):
        return QI(Fraction(text))
    raise ValueError(f"not an exact scalar: {text!r}")


def exact_matrix(rows) -> list:
    return [[QI.coerce(x) for x in row] for row in rows]


def bareiss_rank(matrix) -> int:
    """Rank by fraction-free (Bareiss) elimination with row pivoting."""
    m = [list(row) for row in matrix]
    nrows = len(m)
    if nrows == 0:
        return 0
    ncols = len(m[0])
    prev = QI(1)
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            a = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c + 1, ncols):
                x = p * row_i[j]
                if a:
                    x = x - a * row_r[j]
                row_i[j] = x / prev
            row_i[c] = QI(0)
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def nullspace(matrix) -> list:
    """Basis of {v : M v = 0} from the reduced row echelon form over Q(i)."""
    m = [list(row) for row in matrix]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = QI(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [QI(0)] * ncols
        v[f] = QI(1)
        for row, pc in enumerate(pivots):
            v[pc] = -m[row][f]
        basis.append(v)
    return basis
