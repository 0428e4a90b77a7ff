"""Acceptance criteria, one check per criterion.

Run with ``pytest -s tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``
to see one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from corpus import E_DIGITS, c0_expansion, example, two_cycle_shifted, periodic_corpus, reduced_geodesic_corpus  # noqa: E402
from oracles import balanced, oracle_crossing, to_mp  # noqa: E402

from triangle_cf import (  # noqa: E402
    E,
    ETA,
    INFINITY,
    THETA,
    GroupElement,
    OrientedGeodesic,
    Unit,
    cf_terms,
    constants,
    convergent,
    exit_edge,
    expand,
    generators,
    in_order,
    parse,
    render_cf,
)
from triangle_cf.engine import _minimal_period, boundary_enclosure  # noqa: E402
from triangle_cf.geometry import mobius, sign  # noqa: E402
from triangle_cf.group import identity, is_hyperbolic, verify_constants  # noqa: E402
from triangle_cf.numerics import PrecisionExhausted, precision_limit  # noqa: E402
from triangle_cf.tower import FElem  # noqa: E402

eta = ETA.to_L()


def rotations(block):
    return [tuple(block[i:] + block[:i]) for i in range(len(block))]


def same_cycle(a, b) -> bool:
    return len(a) == len(b) and tuple(b) in rotations(list(a))


def unit_of(text_a: str, text_b: str, text_D: str) -> Unit:
    f = lambda t: parse(t).even_part()  # noqa: E731
    return Unit(f(text_a), f(text_b), f(text_D))


def gamma_matches(g: GroupElement, m: GroupElement) -> bool:
    return g.eq_up_to_sign(m) or g.eq_up_to_sign(m.inverse())


# ---------------------------------------------------------------------------


def criterion_1():
    g2, g3, g7 = generators()
    minus = -identity()
    ok = g2 * g2 == minus and g3**3 == minus and g7**7 == minus and g2 == g7 * g3
    return ok, "g2^2 = g3^3 = g7^7 = -1, g2 = g7 g3"


REFERENCE_CONSTANTS = {
    1: ("-eta + eta^2 + (1 - eta^2)*theta", "4*(1 + 2*eta - 2*eta^2)", "eta - eta^2 + (1 - eta^2)*theta"),
    2: ("-2 + eta + eta^2 + (-3 + eta^2)*theta", "4*(-2 + eta + eta^2)", "2 - eta - eta^2 + (-3 + eta^2)*theta"),
    3: ("eta + eta^2 - (1 + 2*eta + eta^2)*theta", "4*(1 + 3*eta + eta^2)", "-eta - eta^2 - (1 + 2*eta + eta^2)*theta"),
}


def criterion_2():
    K = constants()
    ok = True
    for i, (a, b, c) in REFERENCE_CONSTANTS.items():
        a, b, c = parse(a), parse(b), parse(c)
        ok &= K[i] == (a, b, c) and K[-i] == (-a, b, -c)
    checks = verify_constants()
    ok &= all(checks.values())
    return ok, f"table exact; properties {sorted(k for k, v in checks.items() if v)}"


def criterion_3():
    r = example("diagonal")
    p1 = parse("-1 - eta - (1 - eta - eta^2)*theta")
    p2 = parse("-1 - eta + (1 - eta - eta^2)*theta")
    diag = GroupElement(p1, 0)
    ok_diag = diag.d == p2 and gamma_matches(r.gamma0, diag)
    expected = unit_of("-1 - eta", "1 - eta - eta^2", "eta")
    ok = (
        r.periodic
        and same_cycle(r.period_digits(), [3, -2, 3])
        and r.b0 == identity()
        and ok_diag
        and r.unit().same_up_to_sign_and_inverse(expected)
    )
    return ok, f"period {r.period_digits()}, B0 = {r.b0.word}, eps0 = {r.unit()}"


def criterion_4():
    r = example("two_cycle")
    expected = unit_of("-1/2*(1 + eta)", "-1/2", "eta^2 + 2*eta - 3")
    lead, pairs = cf_terms([1, -1] * 5)
    B = parse("1 + 2*eta - 2*eta^2")
    T = parse("eta^2 - eta")
    structure = (
        lead == parse("(1 - eta^2)*theta + eta^2 - eta")
        and pairs[0][0] == 2 * B
        and all(num == B for num, _ in pairs[1:])
        and all(den == T for _, den in pairs)
    )
    text = render_cf([1, -1] * 3)
    ok = (
        r.periodic
        and same_cycle(r.period_digits(), [1, -1])
        and r.unit().same_up_to_sign_and_inverse(expected)
        and structure
        and "(2 + 4*eta - 4*eta^2)/(-eta + eta^2 + (1 + 2*eta - 2*eta^2)/(-eta + eta^2 + " in text
    )
    return ok, f"period {r.period_digits()}, eps0 = {r.unit()}; cf: {text[:70]}..."


def criterion_5():
    r, ref = two_cycle_shifted(), example("two_cycle")
    ok = (
        r.periodic
        and same_cycle(r.period_digits(), [-1, 1])
        and r.unit().same_up_to_sign_and_inverse(ref.unit())
        and gamma_matches(r.gamma0, ref.gamma0)
    )
    return ok, f"B0 = {r.b0.word}, digits {r.digits}, preperiod {r.preperiod}"


def criterion_6():
    r = example("theta_one")
    expected = unit_of("-11 - 28*eta - 12*eta^2", "-(6 + 18*eta + 8*eta^2)", "2*eta")
    ok = (
        r.periodic
        and same_cycle(r.period_digits(), [-2, 3, -3, 3, -2, 2, -3, 3, -3, 2])
        and r.unit().same_up_to_sign_and_inverse(expected)
    )
    return ok, f"period {r.period_digits()}, eps0 = {r.unit()}"


def criterion_7():
    r = example("two_theta")
    expected = unit_of("-(28 + 80*eta + 36*eta^2)", "-(16 + 43*eta + 19*eta^2)", "4*eta - eta^2")
    ok = (
        r.periodic
        and r.period == 12
        and same_cycle(r.period_digits(), [3, 3, -2, 2, -3, 3, -3, 3, -3, 2, -2, 3])
        and r.unit().same_up_to_sign_and_inverse(expected)
    )
    return ok, f"period {r.period_digits()}, eps0 = {r.unit()}"


def criterion_8():
    target = Fraction("2.7182818284590431")
    try:
        with precision_limit(4096):
            r = expand(OrientedGeodesic(1 / E, E), max_digits=40, b0="g7^2 g2 g7^-2")
    except PrecisionExhausted as exc:
        return False, f"precision exhausted: {exc}"
    x40 = convergent(r, 40, "reg").enclose(200)
    err = max(abs(x40.lower - target), abs(x40.upper - target))
    ok = r.digits[:39] == E_DIGITS[:39] and err < Fraction(1, 10**15)
    return ok, f"first 39 digits match: {r.digits[:39] == E_DIGITS[:39]}; |x_reg_40 - 2.7182818284590431| <= {float(err):.2e}"


def criterion_9():
    r = example("diagonal")
    vals = [convergent(r, 3 * m - 1, "trad") for m in range(1, 11)]
    return all(v is INFINITY for v in vals), "x_trad(3m-1) = oo for m = 1..10"


def _convergence(r, max_k: int = 200):
    alpha = r.geodesic.alpha
    threshold = Fraction(1, 10**6)
    reached = None
    for k, B in enumerate(r.iter_B(max_k)):
        enc = boundary_enclosure(B)
        if enc is None:
            continue  # the enclosure passes through oo and trivially contains alpha
        lo, hi = enc
        if sign(alpha - lo) < 0 or sign(hi - alpha) < 0:
            return False, k
        if reached is None and (hi - lo).enclose(64).upper < threshold:
            reached = k
    return reached is not None, reached


def criterion_10():
    worst, ok = 0, True
    for label, r in periodic_corpus():
        good, k = _convergence(r)
        ok &= good
        if good:
            worst = max(worst, k)
    return ok, f"{len(periodic_corpus())} sessions; width < 1e-6 by k = {worst}"


def _unit_contract(r) -> bool:
    g = r.gamma0
    u = r.unit()
    return (
        g.nrd() == FElem.coerce(1)
        and in_order(g)
        and is_hyperbolic(g)
        and mobius(g, r.geodesic.alpha).key() == r.geodesic.alpha.key()
        and u.norm() == FElem.coerce(1)
        and not g.is_scalar()
        and not u.is_trivial()
        and _minimal_period(r.period_digits()) == r.period
    )


def criterion_11():
    bad = [label for label, r in periodic_corpus() if not _unit_contract(r)]
    return not bad, f"{len(periodic_corpus())} sessions; failures: {bad}"


def criterion_12():
    geos = reduced_geodesic_corpus()
    disagreements = 0
    for g in geos:
        try:
            mine = exit_edge(g)
        except PrecisionExhausted:
            disagreements += 1
            continue
        o = oracle_crossing(to_mp(g.beta), to_mp(g.alpha))
        if o is None or o[0] != 0 or balanced(o[1]) != mine:
            disagreements += 1
    return len(geos) >= 1000 and disagreements == 0, f"{len(geos)} geodesics, {disagreements} disagreements"


def criterion_13():
    r = c0_expansion()
    g = r.gamma0
    fixes = all(mobius(g, p) == p for p in (THETA, -THETA))
    ok = "g3" in str(r.b0.word) and r.periodic and fixes
    return ok, f"B0 = {r.b0.word}, period {r.period_digits()}, gamma0 fixes +-theta: {fixes}"


CRITERIA = [
    (1, "generator identities", criterion_1),
    (2, "constants table and properties", criterion_2),
    (3, "diagonal geodesic (z = theta, w = 0)", criterion_3),
    (4, "two-cycle geodesic and continued fraction rendering", criterion_4),
    (5, "same attracting endpoint from beta = -1", criterion_5),
    (6, "z = theta, w = 1", criterion_6),
    (7, "z = 2 theta, w = theta", criterion_7),
    (8, "numeric endpoint e", criterion_8),
    (9, "traditional convergents diverge", criterion_9),
    (10, "convergence of B_k S0", criterion_10),
    (11, "unit contract", criterion_11),
    (12, "exit_edge vs numeric oracle", criterion_12),
    (13, "stabilizer fixture c0", criterion_13),
]


def _report(num, name, fn) -> bool:
    ok, detail = fn()
    print(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {name}: {detail}")
    return ok


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn):
    assert _report(num, name, fn)


if __name__ == "__main__":
    results = [_report(*c) for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
