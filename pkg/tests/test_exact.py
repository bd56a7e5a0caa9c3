from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from holoentropy.exact import QI, bareiss_rank, format_scalar, nullspace, parse_scalar

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(QI, small, small)


def to_sympy(q: QI):
    return sympy.Rational(q.re.numerator, q.re.denominator) + \
        sympy.I * sympy.Rational(q.im.numerator, q.im.denominator)


@st.composite
def matrices(draw, max_rows=5, max_cols=5, sparse=True):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    zero = st.just(QI(0))
    entry = st.one_of(zero, gauss) if sparse else gauss
    M = [[draw(entry) for _ in range(c)] for _ in range(r)]
    # optionally plant a dependent row
    if r > 1 and draw(st.booleans()):
        k = draw(gauss)
        M[-1] = [k * x + y for x, y in zip(M[0], M[1 % r])]
    return M


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert a - a == 0
    if b:
        assert (a / b) * b == a


def test_scalar_text_roundtrip_examples():
    assert format_scalar(QI(Fraction(3, 4))) == "3/4"
    assert format_scalar(QI(1, -2)) == "(1-2i)"
    assert format_scalar(QI(Fraction(-1, 2), Fraction(1, 3))) == "(-1/2+1/3i)"
    assert parse_scalar("(1-2i)") == QI(1, -2)
    with pytest.raises(ValueError):
        parse_scalar("1.5")


@given(gauss)
def test_scalar_text_roundtrip(q):
    assert parse_scalar(format_scalar(q)) == q


def test_float_input_refused():
    with pytest.raises(TypeError):
        QI(0.5)
    assert QI.from_complex(0.5 + 0.25j) == QI(Fraction(1, 2), Fraction(1, 4))


@given(matrices())
def test_bareiss_rank_matches_sympy(M):
    assert bareiss_rank(M) == sympy.Matrix([[to_sympy(x) for x in row] for row in M]).rank()


@given(matrices())
def test_nullspace_dimension_and_membership(M):
    basis = nullspace(M)
    assert len(basis) == len(M[0]) - bareiss_rank(M)
    for v in basis:
        assert all(sum((a * b for a, b in zip(row, v)), QI(0)) == 0 for row in M)
