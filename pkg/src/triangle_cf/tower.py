"""Exact arithmetic in Q < F = Q(eta) < L = Q(theta) < L(sqrt D).

``eta = 2 cos(2 pi / 7)`` is the positive root of X^3 + X^2 - 2X - 1 and
``theta = sqrt(eta)`` the positive root of X^6 + X^4 - 2X^2 - 1.  Elements are
stored as integer coefficient tuples over a common positive denominator, kept
in lowest terms, so equality is tuple comparison.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import mpmath

from . import numerics
from .numerics import Interval, resolve_sign


class MismatchedContext(ValueError):
    """Arithmetic between quadratic elements over different discriminants."""


def _normalize(coeffs: Sequence[int], den: int) -> tuple[tuple[int, ...], int]:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        coeffs = [-c for c in coeffs]
        den = -den
    g = reduce(math.gcd, coeffs, den)
    if g > 1:
        coeffs = [c // g for c in coeffs]
        den //= g
    return tuple(coeffs), den


def _from_rationals(values: Iterable) -> tuple[tuple[int, ...], int]:
    fr = [Fraction(v) for v in values]
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fr), 1)
    return _normalize([f.numerator * (den // f.denominator) for f in fr], den)


class _SimpleExtensionElement:
    """Shared machinery for Q[X]/(m(X)) with monic integral m."""

    DEGREE: int
    RULE: tuple[int, ...]  # X^DEGREE = sum RULE[i] X^i
    SYMBOL: str
    _TABLE: tuple[tuple[int, ...], ...]

    __slots__ = ("c", "den")

    def __init__(self, coeffs: Iterable = (), den: int = 1):
        vals = list(coeffs)
        if len(vals) > self.DEGREE:
            raise ValueError(f"expected at most {self.DEGREE} coefficients")
        vals += [0] * (self.DEGREE - len(vals))
        if all(isinstance(v, int) for v in vals) and isinstance(den, int):
            self.c, self.den = _normalize(vals, den)
        else:
            c, d = _from_rationals(vals)
            self.c, self.den = _normalize(c, d * den)

    @classmethod
    def _raw(cls, c: Sequence[int], den: int):
        obj = object.__new__(cls)
        obj.c, obj.den = _normalize(c, den)
        return obj

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        n = cls.DEGREE
        table = []
        cur = list(cls.RULE)
        for _ in range(n - 1):
            table.append(tuple(cur))
            # multiply cur by X and reduce
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [a + top * r for a, r in zip(cur, cls.RULE)]
        cls._TABLE = tuple(table)

    # -- coercion -----------------------------------------------------------
    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls._raw((value,) + (0,) * (cls.DEGREE - 1), 1)
        if isinstance(value, Fraction):
            return cls._raw((value.numerator,) + (0,) * (cls.DEGREE - 1), value.denominator)
        raise TypeError(f"cannot coerce {type(value).__name__} into {cls.__name__}")

    def _coerce_other(self, other):
        try:
            return type(self).coerce(other)
        except TypeError:
            return None

    # -- basic protocol -----------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.den) for a in self.c)

    def key(self) -> tuple:
        return (type(self).__name__, self.c, self.den)

    def __hash__(self) -> int:
        return hash(self.key())

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = type(self).coerce(other)
        if type(other) is type(self):
            return self.c == other.c and self.den == other.den
        if isinstance(other, _SimpleExtensionElement) or isinstance(other, QuadRealElem):
            return _common(self, other)[0] == _common(self, other)[1]
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        d = self.den * o.den // math.gcd(self.den, o.den)
        a, b = d // self.den, d // o.den
        return self._raw([x * a + y * b for x, y in zip(self.c, o.c)], d)

    __radd__ = __add__

    def __neg__(self):
        return self._raw([-x for x in self.c], self.den)

    def __sub__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def _mul_coeffs(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        n = self.DEGREE
        conv = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        out = conv[:n]
        for k in range(n, 2 * n - 1):
            t = conv[k]
            if t:
                for i, r in enumerate(self._TABLE[k - n]):
                    if r:
                        out[i] += t * r
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            return self._raw([x * other for x in self.c], self.den)
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return self._raw(self._mul_coeffs(self.c, o.c), self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self._raw(self.c, self.den * other)
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        result = type(self).coerce(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order ---------------------------------------------------------------
    def sign(self) -> int:
        """Sign under the real embedding with eta, theta > 0."""
        return resolve_sign(self)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self) -> float:
        return float(self.enclose(64))

    # -- text ----------------------------------------------------------------
    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


def _format_rational_poly(coeffs: Sequence[Fraction], symbol: str) -> str:
    terms = []
    for k, q in enumerate(coeffs):
        if q == 0:
            continue
        mag = abs(q)
        if k == 0:
            body = str(mag)
        else:
            mono = symbol if k == 1 else f"{symbol}^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        terms.append(("-" if q < 0 else "+", body))
    if not terms:
        return "0"
    head_sign, head = terms[0]
    out = ("-" if head_sign == "-" else "") + head
    for s, body in terms[1:]:
        out += f" {s} {body}"
    return out


class FElem(_SimpleExtensionElement):
    """Element of F = Q(eta) in the basis 1, eta, eta^2."""

    DEGREE = 3
    RULE = (1, 2, -1)  # eta^3 = 1 + 2 eta - eta^2
    SYMBOL = "eta"
    __slots__ = ()

    @classmethod
    def coerce(cls, value):
        if isinstance(value, LElem):
            if not value.in_F():
                raise ValueError(f"{value} does not lie in Q(eta)")
            return value.even_part()
        return super().coerce(value)

    def _coerce_other(self, other):
        if isinstance(other, (LElem, QuadRealElem)):
            return None
        return super()._coerce_other(other)

    def _mult_matrix(self) -> list[list[int]]:
        cols = [list(self.c)]
        for _ in range(2):
            cols.append(self._mul_coeffs(cols[-1], (0, 1, 0)))
        return [[cols[j][i] for j in range(3)] for i in range(3)]

    def inv(self) -> FElem:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(eta)")
        m = self._mult_matrix()
        # first column of adj(m) solves m y = det * e_0
        adj0 = [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
        ]
        det = m[0][0] * adj0[0] + m[0][1] * adj0[1] + m[0][2] * adj0[2]
        return FElem._raw([a * self.den for a in adj0], det)

    def to_L(self) -> LElem:
        a, b, c = self.c
        return LElem._raw((a, 0, b, 0, c, 0), self.den)

    def norm(self) -> Fraction:
        """N_{F/Q}, the determinant of multiplication."""
        m = self._mult_matrix()
        det = (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
        return Fraction(det, self.den**3)

    def enclose(self, prec: int) -> Interval:
        return numerics.linear_form(self.c, self.den, numerics.eta_powers(prec), prec)

    def is_integral(self) -> bool:
        return self.den == 1

    def __str__(self) -> str:
        return _format_rational_poly(self.coeffs, "eta")

    def embeddings(self, dps: int = 50) -> list:
        """Values under the three real embeddings, sigma_1 first."""
        with mpmath.workdps(dps):
            roots = [2 * mpmath.cos(2 * mpmath.pi * k / 7) for k in (1, 2, 3)]
            return [sum(mpmath.mpf(a) * r**i for i, a in enumerate(self.c)) / self.den for r in roots]


class LElem(_SimpleExtensionElement):
    """Element of L = Q(theta) in the basis 1, theta, ..., theta^5."""

    DEGREE = 6
    RULE = (1, 0, 2, 0, -1, 0)  # theta^6 = 1 + 2 theta^2 - theta^4
    SYMBOL = "theta"
    __slots__ = ()

    @classmethod
    def coerce(cls, value):
        if isinstance(value, FElem):
            return value.to_L()
        return super().coerce(value)

    def _coerce_other(self, other):
        if isinstance(other, QuadRealElem):
            return None
        return super()._coerce_other(other)

    @classmethod
    def from_parts(cls, even, odd=0) -> LElem:
        """``even + odd * theta`` with ``even, odd`` in F."""
        e = FElem.coerce(even)
        o = FElem.coerce(odd)
        d = e.den * o.den // math.gcd(e.den, o.den)
        a, b = d // e.den, d // o.den
        return cls._raw(
            (e.c[0] * a, o.c[0] * b, e.c[1] * a, o.c[1] * b, e.c[2] * a, o.c[2] * b), d
        )

    def conj(self) -> LElem:
        """The nontrivial automorphism of L/F, theta -> -theta."""
        c = self.c
        return LElem._raw((c[0], -c[1], c[2], -c[3], c[4], -c[5]), self.den)

    def even_part(self) -> FElem:
        c = self.c
        return FElem._raw((c[0], c[2], c[4]), self.den)

    def odd_part(self) -> FElem:
        c = self.c
        return FElem._raw((c[1], c[3], c[5]), self.den)

    def in_F(self) -> bool:
        c = self.c
        return c[1] == 0 and c[3] == 0 and c[5] == 0

    def norm_to_F(self) -> FElem:
        return (self * self.conj()).even_part()

    def trace_to_F(self) -> FElem:
        return (self + self.conj()).even_part()

    def inv(self) -> LElem:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(theta)")
        return self.conj() * self.norm_to_F().inv().to_L()

    def enclose(self, prec: int) -> Interval:
        return numerics.linear_form(self.c, self.den, numerics.theta_powers(prec), prec)

    def __str__(self) -> str:
        even = self.even_part()
        odd = self.odd_part()
        if odd.is_zero():
            return str(even)
        nz = [q for q in odd.coeffs if q != 0]
        if len(nz) == 1:
            text = str(odd)
            if text == "1":
                odd_text, neg = "theta", False
            elif text == "-1":
                odd_text, neg = "theta", True
            else:
                neg = text.startswith("-")
                odd_text = f"{text.lstrip('-')}*theta"
        else:
            odd_text, neg = f"({odd})*theta", False
        if even.is_zero():
            return ("-" if neg else "") + odd_text
        return f"{even} {'-' if neg else '+'} {odd_text}"


ETA = FElem((0, 1, 0))
THETA = LElem((0, 1))


def _common(a, b):
    """Promote two tower elements to a common type."""
    order = {FElem: 0, LElem: 1, QuadRealElem: 2}
    ta, tb = type(a), type(b)
    if order[ta] >= order[tb]:
        return a, ta.coerce(b) if ta is not QuadRealElem else a.lift(b)
    return (tb.coerce(a) if tb is not QuadRealElem else b.lift(a)), b


# ---------------------------------------------------------------------------
# square roots


def _totally_positive_sqrt_integral(x: FElem) -> FElem | None:
    """Integral y in Z[eta] with y^2 = x (x integral), or None."""
    if x.is_zero():
        return FElem(())
    mag = max(abs(a) for a in x.c)
    dps = len(str(mag)) // 2 + 40
    with mpmath.workdps(dps):
        roots = [2 * mpmath.cos(2 * mpmath.pi * k / 7) for k in (1, 2, 3)]
        vals = [sum(a * r**i for i, a in enumerate(x.c)) for r in roots]
        if any(v <= 0 for v in vals):
            return None
        sq = [mpmath.sqrt(v) for v in vals]
        vand = mpmath.matrix([[r**i for i in range(3)] for r in roots])
        for s2 in (1, -1):
            for s3 in (1, -1):
                rhs = mpmath.matrix([sq[0], s2 * sq[1], s3 * sq[2]])
                sol = mpmath.lu_solve(vand, rhs)
                cand = FElem([int(mpmath.nint(sol[i])) for i in range(3)])
                if cand * cand == x:
                    return cand
    return None


def sqrt_in_F(x: FElem) -> FElem | None:
    """Exact square root in F when one exists (sign chosen positive)."""
    x = FElem.coerce(x)
    if x.is_zero():
        return x
    d = x.den
    y = _totally_positive_sqrt_integral(x * (d * d))
    if y is None:
        return None
    y = y / d
    return -y if y.sign() < 0 else y


@lru_cache(maxsize=256)
def _sqrt_in_L_cached(key: tuple) -> LElem | None:
    D = FElem._raw(key[1], key[2])
    r = sqrt_in_F(D)
    if r is not None:
        return r.to_L()
    r = sqrt_in_F(D * ETA.inv())
    if r is not None:
        s = r.to_L() * THETA
        return -s if s.sign() < 0 else s
    return None


def sqrt_in_L(x) -> LElem | None:
    """Positive square root of an element of F inside L, if it exists."""
    x = FElem.coerce(x)
    return _sqrt_in_L_cached(x.key())


# ---------------------------------------------------------------------------
# L(sqrt D)


class QuadRealElem:
    """``u + v*sqrt(D)`` with u, v in L and D in F, D > 0 and D not a square in L."""

    __slots__ = ("u", "v", "D")

    def __init__(self, u, v, D):
        self.u = LElem.coerce(u)
        self.v = LElem.coerce(v)
        self.D = FElem.coerce(D)

    @classmethod
    def checked(cls, u, v, D) -> QuadRealElem:
        D = FElem.coerce(D)
        if D.sign() <= 0:
            raise ValueError("discriminant must be positive")
        if sqrt_in_L(D) is not None:
            raise ValueError(f"{D} is a square in L; use L-elements directly")
        return cls(u, v, D)

    def lift(self, value) -> QuadRealElem:
        if isinstance(value, QuadRealElem):
            if value.D != self.D:
                raise MismatchedContext(f"sqrt({self.D}) vs sqrt({value.D})")
            return value
        return QuadRealElem(LElem.coerce(value), 0, self.D)

    @classmethod
    def coerce(cls, value):
        raise TypeError("QuadRealElem needs a discriminant context; use .lift")

    def _other(self, other):
        if isinstance(other, (QuadRealElem, LElem, FElem, int, Fraction)):
            return self.lift(other)
        return None

    def key(self) -> tuple:
        return ("Q", self.u.key(), self.v.key(), self.D.key())

    def __hash__(self) -> int:
        return hash(self.key())

    def __eq__(self, other) -> bool:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.u == o.u and self.v == o.v

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return QuadRealElem(self.u + o.u, self.v + o.v, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadRealElem(-self.u, -self.v, self.D)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return QuadRealElem(self.u - o.u, self.v - o.v, self.D)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        Dl = self.D.to_L()
        return QuadRealElem(self.u * o.u + self.v * o.v * Dl, self.u * o.v + self.v * o.u, self.D)

    __rmul__ = __mul__

    def conj(self) -> QuadRealElem:
        """sqrt(D) -> -sqrt(D)."""
        return QuadRealElem(self.u, -self.v, self.D)

    def inv(self) -> QuadRealElem:
        n = self.u * self.u - self.v * self.v * self.D.to_L()
        if n.is_zero():
            raise ZeroDivisionError("non-invertible element of L(sqrt D)")
        ni = n.inv()
        return QuadRealElem(self.u * ni, -self.v * ni, self.D)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = self.lift(1)
        for _ in range(n):
            out = out * self
        return out

    def enclose(self, prec: int) -> Interval:
        p = prec + numerics.GUARD_BITS
        root = self.D.enclose(p).sqrt()
        return (self.u.enclose(p) + self.v.enclose(p) * root).at(prec)

    def sign(self) -> int:
        return resolve_sign(self)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self) -> float:
        return float(self.enclose(64))

    def __str__(self) -> str:
        def wrap(x: LElem) -> str:
            s = str(x)
            return s if (" " not in s and not s.startswith("-")) else f"({s})"

        if self.v.is_zero():
            return str(self.u)
        root = f"sqrt({self.D})"
        vs = root if self.v == 1 else f"{wrap(self.v)}*{root}"
        if self.u.is_zero():
            return vs
        return f"{self.u} + {vs}"

    def __repr__(self) -> str:
        return f"QuadRealElem({self}, D={self.D})"


def F(*coeffs) -> FElem:
    return FElem(coeffs)


def L(*coeffs) -> LElem:
    return LElem(coeffs)
