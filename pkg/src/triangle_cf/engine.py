"""Geodesic continued fraction expansion.

Starting from a reduced geodesic, each step reads off the exit edge ``e'_i``
of the heptagon, records the digit ``i`` and moves the geodesic by
``A_i^{-1}`` where ``A_i = g7^i g2``.  Eventually periodic expansions yield a
primitive hyperbolic element fixing the attracting endpoint, and its
eigenvalue there is a relative unit.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from .geometry import (
    INFINITY,
    OrientedGeodesic,
    alpha_inside,
    crossing,
    initial_reduce,
    is_reduced,
    mobius,
    sign,
)
from .group import (
    GroupElement,
    Word,
    balanced_digit,
    constants,
    digit_matrix,
    from_word,
)
from .numerics import NumericReal, PrecisionExhausted
from .tower import ETA, THETA, FElem, LElem, QuadRealElem, sqrt_in_L

log = logging.getLogger(__name__)

DEFAULT_MAX_DIGITS = 10_000

PERIODIC = "Periodic"
NUMERIC_STREAM = "NumericStream"
BUDGET_EXHAUSTED = "BudgetExhausted"


class NotReduced(ValueError):
    """A supplied starting element does not reduce the geodesic."""


# ---------------------------------------------------------------------------
# inputs


@dataclass(frozen=True)
class QuadraticInput:
    """Geodesic cut out by the quadratic form attached to ``(z, w)``.

    The endpoints are ``(z - conj(z) +- sqrt(D)) / (2w)`` with
    ``D = (z - conj(z))^2 + 4*eta*w*conj(w)``; ``sign`` selects which root is
    the attracting endpoint.
    """

    z: LElem
    w: LElem
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "z", LElem.coerce(self.z))
        object.__setattr__(self, "w", LElem.coerce(self.w))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def discriminant(self) -> FElem:
        diff = self.z - self.z.conj()
        D = diff * diff + 4 * ETA.to_L() * self.w * self.w.conj()
        if not D.in_F():
            raise ArithmeticError("discriminant escaped the base field")
        return D.even_part()


def from_quadratic(q: QuadraticInput) -> tuple[OrientedGeodesic, FElem]:
    """The oriented geodesic of ``q`` together with its discriminant."""
    D = q.discriminant
    if D.sign() <= 0:
        raise ValueError(f"discriminant {D} is not positive")
    diff = q.z - q.z.conj()
    if q.w.is_zero():
        if q.sign > 0:
            return OrientedGeodesic(LElem.coerce(0), INFINITY), D
        return OrientedGeodesic(INFINITY, LElem.coerce(0)), D
    root = sqrt_in_L(D)
    two_w = 2 * q.w
    if root is not None:
        alpha = (diff + q.sign * root) / two_w
        beta = (diff - q.sign * root) / two_w
        return OrientedGeodesic(beta, alpha), D
    inv = two_w.inv()
    alpha = QuadRealElem.checked(diff * inv, q.sign * inv, D)
    return OrientedGeodesic(alpha.conj(), alpha), D


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class Unit:
    """``a + b*sqrt(D)`` with a, b in F."""

    a: FElem
    b: FElem
    D: FElem

    def norm(self) -> FElem:
        return self.a * self.a - self.b * self.b * self.D

    def is_trivial(self) -> bool:
        return self.b.is_zero() and (self.a * self.a - 1).is_zero()

    def inverse(self) -> Unit:
        n = self.norm().inv()
        return Unit(self.a * n, -self.b * n, self.D)

    def __eq__(self, other) -> bool:
        """Equal as real numbers, even when written over different square roots."""
        if not isinstance(other, Unit):
            return NotImplemented
        # sqrt(D), sqrt(D') > 0, so b*sqrt(D) = b'*sqrt(D') iff the squares
        # agree and b, b' have the same sign
        return (
            (self.a - other.a).is_zero()
            and (self.b * self.b * self.D - other.b * other.b * other.D).is_zero()
            and self.b.sign() == other.b.sign()
        )

    __hash__ = None

    def same_up_to_sign_and_inverse(self, other: Unit) -> bool:
        inv = other.inverse()
        return any(self == c for c in (other, -other, inv, -inv))

    def __neg__(self) -> Unit:
        return Unit(-self.a, -self.b, self.D)

    def __str__(self) -> str:
        return f"{self.a} + ({self.b})*sqrt({self.D})"


@dataclass
class ExpansionResult:
    geodesic: OrientedGeodesic
    b0: GroupElement
    digits: list[int]
    status: str
    preperiod: Optional[int] = None
    period: Optional[int] = None
    discriminant: Optional[FElem] = None
    _gamma0: Optional[GroupElement] = field(default=None, repr=False)

    @property
    def periodic(self) -> bool:
        return self.status == PERIODIC

    def digit(self, k: int) -> int:
        """The digit ``i_k`` (1-based), continued periodically when the expansion is periodic."""
        if k < 1:
            raise IndexError("digits are indexed from 1")
        if k <= len(self.digits):
            return self.digits[k - 1]
        if not self.periodic:
            raise IndexError(f"only {len(self.digits)} digits available")
        k0, l0 = self.preperiod, self.period
        return self.digits[k0 + (k - 1 - k0) % l0]

    def iter_B(self, n: int):
        """Yield ``B_0, B_1, ..., B_n``."""
        out = self.b0
        yield out
        for k in range(1, n + 1):
            out = out * digit_matrix(self.digit(k))
            yield out

    def iter_geodesics(self, n: int):
        """Yield the reduced geodesics ``B_k^{-1} geo`` for k = 0..n."""
        cur = self.geodesic.transform(self.b0.inverse())
        yield cur
        for k in range(1, n + 1):
            cur = cur.transform(digit_matrix(self.digit(k)).inverse())
            yield cur

    def B(self, k: int) -> GroupElement:
        """``B_k = B_0 A_{i_1} ... A_{i_k}``."""
        if k < 0:
            raise IndexError("negative index")
        for out in self.iter_B(k):
            pass
        return out

    def period_digits(self) -> list[int]:
        if not self.periodic:
            raise ValueError("expansion is not periodic")
        return self.digits[self.preperiod : self.preperiod + self.period]

    @property
    def gamma0(self) -> GroupElement:
        if not self.periodic:
            raise ValueError("expansion is not periodic")
        if self._gamma0 is None:
            k0, l0 = self.preperiod, self.period
            Bk = self.B(k0)
            self._gamma0 = self.B(k0 + l0) * Bk.inverse()
        return self._gamma0

    def unit(self) -> Unit:
        return rho_alpha(self.gamma0, self.geodesic.alpha, self.discriminant)


# ---------------------------------------------------------------------------
# expansion


def _minimal_period(block: list[int]) -> int:
    n = len(block)
    for p in range(1, n + 1):
        if n % p == 0 and block[p:] + block[:p] == block:
            return p
    return n


def expand(
    geo: OrientedGeodesic,
    max_digits: int = DEFAULT_MAX_DIGITS,
    b0: GroupElement | Word | str | None = None,
    discriminant: FElem | None = None,
) -> ExpansionResult:
    """Expand ``geo`` until periodicity is proved or ``max_digits`` digits are read.

    Exact endpoints: a repeat of the pair (alpha_k, beta_k) proves periodicity.
    If only alpha is exact, a repeat of alpha_k confirmed over two full
    periods with identical digit blocks is accepted.  Non-exact alpha yields a
    digit stream with status ``NumericStream``.
    """
    if b0 is None:
        B = initial_reduce(geo)
    else:
        B = b0 if isinstance(b0, GroupElement) else from_word(b0)
        if not is_reduced(geo.transform(B.inverse())):
            raise NotReduced(f"B0 = {B.word} does not reduce {geo}")

    alpha_exact = not isinstance(geo.alpha, NumericReal)
    pair_exact = alpha_exact and not isinstance(geo.beta, NumericReal)
    digits: list[int] = []
    cur = geo.transform(B.inverse())
    pair_seen: dict[tuple, int] = {}
    alpha_seen: dict[tuple, list[int]] = {}
    Bk = B

    for k in range(max_digits + 1):
        if pair_exact:
            key = cur.key()
            j = pair_seen.get(key)
            if j is not None:
                return _finish_periodic(geo, B, digits, j, k - j, discriminant)
            pair_seen[key] = k
        if alpha_exact:
            hist = alpha_seen.setdefault(cur.alpha.key(), [])
            hist.append(k)
            if len(hist) >= 3:
                l = hist[-1] - hist[-2]
                if hist[-2] - hist[-3] == l and digits[k - 2 * l : k - l] == digits[k - l : k]:
                    return _finish_periodic(geo, B, digits, k - 2 * l, l, discriminant)
        if k == max_digits:
            break
        try:
            c = crossing(cur)
        except PrecisionExhausted as exc:
            exc.partial = ExpansionResult(geo, B, digits, NUMERIC_STREAM, discriminant=discriminant)
            raise
        if c is None or c.entry != 0 or not alpha_inside(cur):
            raise AssertionError(f"reducedness invariant broken at step {k}: {cur}")
        i = balanced_digit(c.exit)
        digits.append(i)
        A = digit_matrix(i)
        if alpha_exact:
            cur = cur.transform(A.inverse())
        else:
            Bk = Bk * A
            cur = geo.transform(Bk.inverse())

    status = BUDGET_EXHAUSTED if alpha_exact else NUMERIC_STREAM
    return ExpansionResult(geo, B, digits, status, discriminant=discriminant)


def _finish_periodic(geo, B, digits, k0, l0, discriminant) -> ExpansionResult:
    block = digits[k0 : k0 + l0]
    l0 = _minimal_period(block)
    res = ExpansionResult(geo, B, digits, PERIODIC, k0, l0, discriminant)
    # pull the start of the period back as far as the digits and alpha allow
    alpha_keys = _alpha_keys(res, k0 + l0)
    while k0 > 0 and digits[k0 - 1] == digits[k0 - 1 + l0] and alpha_keys[k0 - 1] == alpha_keys[k0 - 1 + l0]:
        k0 -= 1
    res.preperiod = k0
    res.digits = digits[: k0 + l0]
    g = res.gamma0
    if mobius(g, geo.alpha).key() != geo.alpha.key():
        raise AssertionError("period element does not fix alpha")
    return res


def _alpha_keys(res: ExpansionResult, n: int) -> list[tuple]:
    cur = res.geodesic.alpha
    cur = mobius(res.b0.inverse(), cur)
    out = [cur.key()]
    for i in res.digits[:n]:
        cur = mobius(digit_matrix(i).inverse(), cur)
        out.append(cur.key())
    return out


# ---------------------------------------------------------------------------
# units


def rho_alpha(g: GroupElement, alpha, D: FElem | None = None) -> Unit:
    """Eigenvalue of ``g`` on the line through ``(alpha, 1)``, as ``a + b*sqrt(D)``.

    When ``alpha`` is oo the eigenvalue is the top-left entry, otherwise it is
    ``c*alpha + d``.  Without a discriminant the characteristic polynomial of
    ``g`` supplies one.
    """
    if D is None:
        t = g.trd()
        D = t * t - 4
    lam = g.a if alpha is INFINITY else g.c * alpha + g.d
    if isinstance(lam, QuadRealElem):
        if not (lam.u.in_F() and lam.v.in_F()):
            raise ArithmeticError("eigenvalue does not lie in F(sqrt D)")
        if lam.D != D:
            # rewrite over the requested discriminant: sqrt(lam.D) = q*sqrt(D)
            q2 = lam.D * D.inv()
            q = sqrt_in_L(q2)
            if q is None or not q.in_F():
                raise ArithmeticError("discriminants differ by a non-square")
            return Unit(lam.u.even_part(), lam.v.even_part() * q.even_part(), D)
        return Unit(lam.u.even_part(), lam.v.even_part(), D)
    lam = LElem.coerce(lam)
    if lam.odd_part().is_zero():
        return Unit(lam.even_part(), FElem.coerce(0), D)
    root = sqrt_in_L(D)
    if root is None:
        # the eigenvalue lies in L, so D*(square) is a square in L: compare
        t = g.trd()
        D2 = t * t - 4
        root = sqrt_in_L(D2)
        if root is None:
            raise ArithmeticError("eigenvalue in L but discriminant is not a square in L")
        D = D2
    if not root.even_part().is_zero():
        raise ArithmeticError("sqrt(D) has an unexpected even part")
    y = root.odd_part()
    return Unit(lam.even_part(), lam.odd_part() * y.inv(), D)


def fundamental_unit(res: ExpansionResult) -> Unit:
    return res.unit()


# ---------------------------------------------------------------------------
# convergents and enclosures


def convergent(res: ExpansionResult, k: int, kind: str = "reg"):
    """``reg``: B_k * 0.  ``trad``: B_{k+1} * oo."""
    if k < 0:
        raise IndexError("negative index")
    if kind == "reg":
        return mobius(res.B(k), LElem.coerce(0))
    if kind == "trad":
        return mobius(res.B(k + 1), INFINITY)
    raise ValueError(f"unknown convergent kind {kind!r}")


def boundary_enclosure(B: GroupElement):
    """Endpoints (lo, hi) of ``B([-theta, theta])`` or None if it passes through oo."""
    a, b, c, d = B.entries()
    if not c.is_zero():
        pole = -d / c
        if sign(pole * pole - ETA.to_L()) <= 0:
            return None
    p, q = mobius(B, -THETA), mobius(B, THETA)
    return (p, q) if sign(q - p) > 0 else (q, p)


# ---------------------------------------------------------------------------
# continued fraction coefficients


def _content_scale(x: LElem) -> Fraction:
    """Reciprocal of the signed rational content of x (leading coefficient positive)."""
    cs = x.coeffs
    nz = [v for v in cs if v != 0]
    if not nz:
        raise ZeroDivisionError("zero partial denominator")
    num = 0
    den = 1
    for v in nz:
        num = gcd(num, v.numerator)
        den = den * v.denominator // gcd(den, v.denominator)
    content = Fraction(num, den)
    if nz[-1] < 0:
        content = -content
    return 1 / content


def cf_coefficients(digits: list[int]) -> list[tuple[LElem, LElem, LElem]]:
    """``(a_i, b_i, c_i)`` for each digit."""
    K = constants()
    return [K[i] for i in digits]


def cf_terms(digits: list[int], simplify: bool = True) -> tuple[LElem, list[tuple[LElem, LElem]]]:
    """Leading term and (numerator, denominator) pairs of the expansion.

    ``x = a_{i1} - b_{i1}/(c_{i1} + a_{i2} - b_{i2}/(c_{i2} + ...))``, rewritten
    as ``lead + N_1/(D_1 + N_2/(D_2 + ...))``.  With ``simplify`` each
    denominator is divided by its signed rational content (an equivalence
    transformation, so the value is unchanged).
    """
    if not digits:
        raise ValueError("need at least one digit")
    K = constants()
    lead = K.a[digits[0]]
    pairs = []
    prev_r = Fraction(1)
    for k in range(len(digits) - 1):
        num = -K.b[digits[k]]
        den = K.c[digits[k]] + K.a[digits[k + 1]]
        r = _content_scale(den) if simplify else Fraction(1)
        pairs.append((num * (prev_r * r), den * r))
        prev_r = r
    return lead, pairs


def render_cf(digits: list[int], simplify: bool = True, latex: bool = False) -> str:
    lead, pairs = cf_terms(digits, simplify)
    fmt = _latex if latex else str
    out = "..."
    for num, den in reversed(pairs):
        if latex:
            out = rf"\cfrac{{{fmt(num)}}}{{{fmt(den)} + {out}}}"
        else:
            out = f"({num})/({den} + {out})"
    return f"{fmt(lead)} + {out}"


def _latex(x: LElem) -> str:
    text = str(x).replace("*", " ")
    return re.sub(r"theta|eta", lambda m: r"\sqrt{\eta}" if m.group() == "theta" else r"\eta", text)
