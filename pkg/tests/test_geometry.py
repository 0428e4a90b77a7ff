import os
import sys
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from oracles import balanced, oracle_crossing, to_mp  # noqa: E402

from triangle_cf.geometry import (  # noqa: E402
    INFINITY,
    OrientedGeodesic,
    crossing,
    exit_edge,
    heptagon,
    initial_reduce,
    is_reduced,
    mobius,
    side_of_vertex,
)
from triangle_cf.group import constants, digit_matrix, from_word, generators, identity  # noqa: E402
from triangle_cf.tower import THETA, LElem  # noqa: E402

g2, g3, g7 = generators()
ZERO = LElem.coerce(0)
C0 = OrientedGeodesic(-THETA, THETA)
DOWN = OrientedGeodesic(INFINITY, ZERO)  # the geodesic from oo to 0

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=30)


def test_mobius_examples():
    assert mobius(g2, INFINITY) == ZERO
    assert mobius(identity(), THETA) == THETA
    assert mobius(g7, ZERO) == constants().a[1]
    assert mobius(g2, ZERO) is INFINITY


@given(rationals, st.sampled_from(["g2", "g3", "g7", "g7^-2 g3", "g3^-1 g2 g7"]), st.sampled_from(["g2", "g7^3", "g3 g7"]))
@settings(max_examples=40, deadline=None)
def test_mobius_respects_composition(p, a, b):
    g, h = from_word(a), from_word(b)
    x = LElem.coerce(p)
    assert mobius(g * h, x) == mobius(g, mobius(h, x))


@given(rationals, rationals)
@settings(max_examples=40, deadline=None)
def test_mobius_injective(p, q):
    assume(p != q)
    g = from_word("g7^2 g2 g3")
    assert mobius(g, LElem.coerce(p)) != mobius(g, LElem.coerce(q))


def test_heptagon_data():
    hep = heptagon()
    assert len(hep.vertices) == 7 and len(hep.u) == 7
    assert all(isinstance(u, LElem) for u in hep.u + hep.v)
    # adjacent edge geodesics meet at the shared vertex
    for k in range(7):
        edge = OrientedGeodesic(hep.u[k], hep.v[k])
        assert side_of_vertex(hep.vertices[k], edge) == 0
        assert side_of_vertex(hep.vertices[(k + 1) % 7], edge) == 0
        others = [j for j in range(7) if j not in (k, (k + 1) % 7)]
        assert all(side_of_vertex(hep.vertices[j], edge) != 0 for j in others)


def test_side_of_vertex_examples():
    hep = heptagon()
    assert side_of_vertex(hep.vertices[0], C0) == 0
    assert side_of_vertex(hep.tau7, DOWN) == 0
    assert side_of_vertex(hep.vertices[0], DOWN) == -1


def test_is_reduced_examples():
    assert is_reduced(DOWN)
    assert not is_reduced(C0)
    assert not is_reduced(OrientedGeodesic(ZERO, INFINITY))
    assert not is_reduced(OrientedGeodesic(INFINITY, THETA))  # |alpha| = theta exactly


def test_exit_edge_examples():
    assert exit_edge(DOWN) == 3
    assert exit_edge(C0.transform(g3)) == -2
    assert exit_edge(DOWN.transform(digit_matrix(3).inverse())) == -2
    with pytest.raises(ValueError):
        exit_edge(C0)


def _through_vertex(k: int, beta: Fraction) -> OrientedGeodesic:
    """The geodesic from beta passing through V_k."""
    V = heptagon().vertices[k]
    b = LElem.coerce(beta)
    alpha = (b * V.x - V.n) / (b - V.x)
    return OrientedGeodesic(b, alpha)


def test_vertex_cases_match_oracle():
    # geodesics through tau3 from a range of starting points exercise the
    # vertex-hit cases of the half-open edge rules
    seen = set()
    for num in range(-400, 401, 7):
        beta = Fraction(num, 40)
        if beta in (0,):
            continue
        try:
            geo = _through_vertex(0, beta)
        except (ZeroDivisionError, ValueError):
            continue
        if not is_reduced(geo):
            continue
        c = crossing(geo)
        seen.add(c.exit if not c.through_interior else ("interior", c.exit))
        o = oracle_crossing(to_mp(geo.beta), to_mp(geo.alpha))
        assert o[0] == 0 and balanced(o[1]) == exit_edge(geo)
    assert seen


def test_touching_at_single_vertex_gives_minus_one():
    found = False
    for num in range(-300, 301):
        if num == 0:
            continue
        try:
            geo = _through_vertex(0, Fraction(num, 20))
        except (ZeroDivisionError, ValueError):
            continue
        c = crossing(geo)
        if c is not None and not c.through_interior and c.entry == 0 and c.exit == 6 and is_reduced(geo):
            assert exit_edge(geo) == -1
            found = True
    assert found


def test_reduced_stays_reduced():
    geo = DOWN
    for _ in range(12):
        i = exit_edge(geo)
        geo = geo.transform(digit_matrix(i).inverse())
        assert is_reduced(geo)


def test_initial_reduce_examples():
    assert initial_reduce(DOWN) == identity()
    b0 = initial_reduce(C0)
    assert b0 == g3.inverse()
    assert is_reduced(C0.transform(b0.inverse()))


@given(rationals, rationals)
@settings(max_examples=60, deadline=None)
def test_initial_reduce_property(a, b):
    assume(a != b)
    geo = OrientedGeodesic(LElem.coerce(b), LElem.coerce(a))
    B0 = initial_reduce(geo)
    assert is_reduced(geo.transform(B0.inverse()))
    if is_reduced(geo):
        assert B0 == identity()


@given(rationals)
@settings(max_examples=20, deadline=None)
def test_initial_reduce_vertical(x):
    for geo in (OrientedGeodesic(INFINITY, LElem.coerce(x)), OrientedGeodesic(LElem.coerce(x), INFINITY)):
        B0 = initial_reduce(geo)
        assert is_reduced(geo.transform(B0.inverse()))


def test_geodesic_validation():
    with pytest.raises(ValueError):
        OrientedGeodesic(THETA, THETA)
    with pytest.raises(ValueError):
        OrientedGeodesic(INFINITY, INFINITY)
