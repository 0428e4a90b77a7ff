from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triangle_cf.expr import ParseError, parse
from triangle_cf.numerics import NumericReal
from triangle_cf.tower import ETA, THETA, F, LElem, QuadRealElem

eta = ETA.to_L()
rat = st.fractions(min_value=-9, max_value=9, max_denominator=12)
l_elems = st.lists(rat, min_size=6, max_size=6).map(LElem)


def test_basic_values():
    assert parse("eta") == eta
    assert parse("theta^2") == eta
    assert parse("1/2") == LElem.coerce(Fraction(1, 2))
    assert parse("-(1 + eta)*theta") == -(1 + eta) * THETA
    assert parse("sqrt(eta)") == THETA
    assert parse("sqrt(4*eta)") == 2 * THETA
    assert parse("eta**3") == parse("eta^3")


def test_sqrt_outside_L():
    x = parse("sqrt(2)")
    assert isinstance(x, QuadRealElem) and x * x == x.lift(2)
    y = parse("1 + theta + sqrt(8*eta)")
    assert isinstance(y, QuadRealElem) and y.u == 1 + THETA


def test_sqrtD():
    D = F(2)
    x = parse("1 + sqrtD", D=D)
    assert x == QuadRealElem(1, 1, D)
    assert parse("sqrtD", D=4 * ETA) == 2 * THETA
    with pytest.raises(ParseError):
        parse("sqrtD")


def test_numeric_mode():
    x = parse("e + 1/2", numeric=True)
    assert isinstance(x, NumericReal)
    assert abs(float(x) - 3.218281828459045) < 1e-14
    assert abs(float(parse("2.5*pi", numeric=True)) - 7.853981633974483) < 1e-14
    # exact expressions stay exact in numeric mode
    assert parse("eta", numeric=True) == eta


@pytest.mark.parametrize(
    "text",
    ["", "eta +", "foo", "e", "pi", "2.5", "sqrt(theta)", "sqrt(-2)", "eta^(1/2)", "1/0", "f(1)", "[1]", "'a'", "sqrt(2) + sqrt(3)"],
)
def test_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_error_is_value_error():
    assert issubclass(ParseError, ValueError)


@given(l_elems)
@settings(max_examples=100, deadline=None)
def test_round_trip_L(x):
    assert parse(str(x)) == x


@given(rat, rat, st.sampled_from(["2", "3", "8*eta", "eta^2 + 2*eta - 3"]))
@settings(max_examples=40, deadline=None)
def test_round_trip_quad(u, v, D_text):
    D = parse(D_text).even_part()
    if v == 0:
        return
    x = QuadRealElem.checked(u, v, D)
    assert parse(str(x)) == x


@pytest.mark.parametrize("text", ["0", "1", "-2 + eta + eta^2", "(1 - eta^2)*theta", "1/3 - 2*eta + (5/2)*theta^3"])
def test_canonical_text_is_fixed(text):
    x = parse(text)
    assert str(parse(str(x))) == str(x)
