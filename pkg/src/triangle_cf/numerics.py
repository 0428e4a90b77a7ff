"""Certified dyadic interval arithmetic.

Every inequality decided elsewhere in the package bottoms out here.  An
:class:`Interval` stores integer endpoints scaled by ``2**-prec`` and every
operation rounds outward, so the true value is always enclosed.  Exact values
(tower elements) expose ``is_zero()`` and ``enclose(prec)``; numeric values
(:class:`NumericReal`) only expose ``enclose(prec)``.  :func:`resolve_sign`
combines the two.
"""

from __future__ import annotations

import math
import os
import threading
from contextlib import contextmanager
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

DEFAULT_MAX_PRECISION = 4096
START_PRECISION = 64
GUARD_BITS = 8


class PrecisionExhausted(ArithmeticError):
    """Raised when a sign cannot be certified within the precision ceiling."""


class Indeterminate(ArithmeticError):
    """An enclosure could not be formed at this precision (e.g. division by an
    interval containing zero).  Callers retry at a higher precision."""


_LIMIT = threading.local()


def max_precision() -> int:
    """Precision ceiling in bits: explicit override, then env var, then default."""
    override = getattr(_LIMIT, "bits", None)
    if override is not None:
        return override
    env = os.environ.get("TRIANGLE_CF_MAX_PRECISION")
    if env:
        return int(env)
    return DEFAULT_MAX_PRECISION


@contextmanager
def precision_limit(bits: int | None):
    """Temporarily set the precision ceiling for this thread."""
    old = getattr(_LIMIT, "bits", None)
    _LIMIT.bits = bits if bits is None else max(int(bits), START_PRECISION)
    try:
        yield
    finally:
        _LIMIT.bits = old


def _ceil_shift(x: int, bits: int) -> int:
    return -((-x) >> bits)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class Interval:
    """Closed interval ``[lo, hi] * 2**-prec`` with integer ``lo <= hi``."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo: int, hi: int, prec: int):
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.prec = prec

    # -- construction -----------------------------------------------------
    @classmethod
    def point(cls, value, prec: int) -> Interval:
        q = Fraction(value)
        scaled = q * (1 << prec)
        lo = scaled.numerator // scaled.denominator
        hi = _ceil_div(scaled.numerator, scaled.denominator)
        return cls(lo, hi, prec)

    @classmethod
    def from_bounds(cls, lo, hi, prec: int) -> Interval:
        a = Fraction(lo) * (1 << prec)
        b = Fraction(hi) * (1 << prec)
        return cls(a.numerator // a.denominator, _ceil_div(b.numerator, b.denominator), prec)

    def at(self, prec: int) -> Interval:
        """Same enclosure expressed at another precision (outward rounded)."""
        if prec == self.prec:
            return self
        if prec > self.prec:
            s = prec - self.prec
            return Interval(self.lo << s, self.hi << s, prec)
        s = self.prec - prec
        return Interval(self.lo >> s, _ceil_shift(self.hi, s), prec)

    # -- queries ----------------------------------------------------------
    @property
    def lower(self) -> Fraction:
        return Fraction(self.lo, 1 << self.prec)

    @property
    def upper(self) -> Fraction:
        return Fraction(self.hi, 1 << self.prec)

    @property
    def width(self) -> Fraction:
        return Fraction(self.hi - self.lo, 1 << self.prec)

    @property
    def midpoint(self) -> Fraction:
        return Fraction(self.lo + self.hi, 1 << (self.prec + 1))

    def sign(self) -> int | None:
        """-1/+1 when the interval excludes zero, 0 for the point zero, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 and self.hi == 0:
            return 0
        return None

    def contains(self, value) -> bool:
        q = Fraction(value)
        return self.lower <= q <= self.upper

    def contains_interval(self, other: Interval) -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def __float__(self) -> float:
        return float(self.midpoint)

    def __repr__(self) -> str:
        return f"Interval([{float(self.lower)!r}, {float(self.upper)!r}], prec={self.prec})"

    # -- arithmetic -------------------------------------------------------
    def _align(self, other) -> tuple[Interval, Interval]:
        if not isinstance(other, Interval):
            other = Interval.point(other, self.prec)
        p = max(self.prec, other.prec)
        return self.at(p), other.at(p)

    def __add__(self, other) -> Interval:
        a, b = self._align(other)
        return Interval(a.lo + b.lo, a.hi + b.hi, a.prec)

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo, self.prec)

    def __sub__(self, other) -> Interval:
        a, b = self._align(other)
        return Interval(a.lo - b.hi, a.hi - b.lo, a.prec)

    def __rsub__(self, other) -> Interval:
        return (-self) + other

    def __mul__(self, other) -> Interval:
        if isinstance(other, int):
            if other >= 0:
                return Interval(self.lo * other, self.hi * other, self.prec)
            return Interval(self.hi * other, self.lo * other, self.prec)
        a, b = self._align(other)
        p = a.prec
        prods = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
        return Interval(min(prods) >> p, _ceil_shift(max(prods), p), p)

    __rmul__ = __mul__

    def scale_down(self, d: int) -> Interval:
        """Divide by a positive integer."""
        return Interval(self.lo // d, _ceil_div(self.hi, d), self.prec)

    def __truediv__(self, other) -> Interval:
        a, b = self._align(other)
        if b.lo <= 0 <= b.hi:
            raise Indeterminate("division by an interval containing zero")
        p = a.prec
        nums = (a.lo << p, a.hi << p)
        quots_lo = [n // d for n in nums for d in (b.lo, b.hi)]
        quots_hi = [_ceil_div(n, d) for n in nums for d in (b.lo, b.hi)]
        return Interval(min(quots_lo), max(quots_hi), p)

    def __rtruediv__(self, other) -> Interval:
        return Interval.point(other, self.prec) / self

    def __pow__(self, n: int) -> Interval:
        if n < 0:
            return Interval.point(1, self.prec) / (self**-n)
        result = Interval(1 << self.prec, 1 << self.prec, self.prec)
        for _ in range(n):
            result = result * self
        if n % 2 == 0 and self.lo < 0 < self.hi:
            result = Interval(0, result.hi, result.prec)
        return result

    def sqrt(self) -> Interval:
        if self.lo < 0:
            raise Indeterminate("square root of an interval reaching below zero")
        p = self.prec
        lo = math.isqrt(self.lo << p)
        hi = math.isqrt(self.hi << p)
        if hi * hi < (self.hi << p):
            hi += 1
        return Interval(lo, hi, p)


# ---------------------------------------------------------------------------
# root isolation


def _poly_eval(coeffs: Sequence, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _bisect(coeffs: Sequence, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    flo = _poly_eval(coeffs, lo)
    fhi = _poly_eval(coeffs, hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("polynomial does not change sign on the bracket")
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = _poly_eval(coeffs, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def isolate_root(poly: Sequence, bracket: tuple, precision: int) -> Interval:
    """Enclose the unique root of ``poly`` (coefficients low to high) in
    ``bracket`` by bisection, to width at most ``2**-precision``."""
    coeffs = [Fraction(c) for c in poly]
    lo, hi = Fraction(bracket[0]), Fraction(bracket[1])
    lo, hi = _bisect(coeffs, lo, hi, Fraction(1, 1 << (precision + 1)))
    if lo == hi and lo.denominator & (lo.denominator - 1) == 0:
        return Interval.from_bounds(lo, lo, max(precision, lo.denominator.bit_length() - 1))
    return Interval.from_bounds(lo, hi, precision + 2)


class _RootCache:
    """Narrowing-only cache of an isolating bracket for a fixed real root."""

    def __init__(self, poly: Sequence, bracket: tuple):
        self.poly = [Fraction(c) for c in poly]
        lo, hi = Fraction(bracket[0]), Fraction(bracket[1])
        flo, fhi = _poly_eval(self.poly, lo), _poly_eval(self.poly, hi)
        if flo == 0 or fhi == 0 or (flo > 0) == (fhi > 0):
            raise RuntimeError(f"bracket {bracket} does not isolate a simple root")
        self.lo, self.hi = lo, hi
        self._lock = threading.Lock()

    def enclosure(self, precision: int) -> Interval:
        with self._lock:
            target = Fraction(1, 1 << (precision + 1))
            if self.hi - self.lo > target:
                self.lo, self.hi = _bisect(self.poly, self.lo, self.hi, target)
            lo, hi = self.lo, self.hi
        return Interval.from_bounds(lo, hi, precision + 2)


ETA_POLY = (-1, -2, 1, 1)  # X^3 + X^2 - 2X - 1
THETA_POLY = (-1, 0, -2, 0, 1, 0, 1)  # X^6 + X^4 - 2X^2 - 1

_ETA = _RootCache(ETA_POLY, (Fraction(124, 100), Fraction(125, 100)))
_THETA = _RootCache(THETA_POLY, (Fraction(11, 10), Fraction(12, 10)))


@lru_cache(maxsize=64)
def eta_powers(prec: int) -> tuple[Interval, ...]:
    eta = _ETA.enclosure(prec + GUARD_BITS)
    one = Interval.point(1, eta.prec)
    return (one, eta, eta * eta)


@lru_cache(maxsize=64)
def theta_powers(prec: int) -> tuple[Interval, ...]:
    theta = _THETA.enclosure(prec + GUARD_BITS)
    out = [Interval.point(1, theta.prec)]
    for _ in range(5):
        out.append(out[-1] * theta)
    return tuple(out)


def linear_form(coeffs: Sequence[int], den: int, powers: Sequence[Interval], prec: int) -> Interval:
    """Enclosure of ``sum(c_i * power_i) / den`` rounded to ``prec`` bits."""
    p = powers[0].prec
    lo = hi = 0
    for c, pw in zip(coeffs, powers):
        if c > 0:
            lo += c * pw.lo
            hi += c * pw.hi
        elif c < 0:
            lo += c * pw.hi
            hi += c * pw.lo
    iv = Interval(lo, hi, p)
    if den != 1:
        iv = iv.scale_down(den)
    return iv.at(prec) if prec < p else iv


# ---------------------------------------------------------------------------
# sign resolution


def resolve_sign(value, max_prec: int | None = None) -> int:
    """Certified sign of ``value``.

    Exact values are first checked for zero symbolically; otherwise precision
    doubles from 64 bits until the enclosure excludes zero.
    """
    is_zero = getattr(value, "is_zero", None)
    if is_zero is not None and is_zero():
        return 0
    if isinstance(value, (int, Fraction)):
        return (value > 0) - (value < 0)
    limit = max_prec if max_prec is not None else max_precision()
    prec = START_PRECISION
    while True:
        try:
            s = value.enclose(prec).sign()
        except Indeterminate:
            s = None
        if s is not None and (s != 0 or is_zero is not None):
            return s
        if prec >= limit:
            raise PrecisionExhausted(f"sign undecided at {prec} bits")
        prec = min(prec * 2, limit)


def enclose(value, prec: int) -> Interval:
    if isinstance(value, (int, Fraction)):
        return Interval.point(value, prec)
    return value.enclose(prec)


def format_enclosure(iv: Interval) -> str:
    """Decimal rendering with an explicit error bound, e.g. ``2.71828 ± 1e-5``."""
    mid = iv.midpoint
    rad = iv.width / 2
    if rad == 0:
        digits = 20
    else:
        digits = max(0, -math.floor(math.log10(rad)) - 1)
    scaled = mid * 10**digits
    rounded = round(scaled)
    bound = rad + abs(Fraction(rounded, 10**digits) - mid)
    if bound == 0:
        exp = -digits
    else:
        exp = math.ceil(math.log10(bound))
        if Fraction(10) ** exp < bound:
            exp += 1
    sign = "-" if rounded < 0 else ""
    whole, frac = divmod(abs(rounded), 10**digits)
    text = f"{sign}{whole}" + (f".{frac:0{digits}d}" if digits else "")
    return f"{text} ± 1e{exp}"


# ---------------------------------------------------------------------------
# numeric-mode reals


class NumericReal:
    """A real number known only through enclosures at requested precision.

    Arithmetic builds closures; nothing is evaluated until ``enclose`` is
    called.  There is no exact-zero oracle, so a true tie surfaces as
    :class:`PrecisionExhausted` from :func:`resolve_sign`.
    """

    __slots__ = ("_fn", "label", "_cache")

    def __init__(self, fn: Callable[[int], Interval], label: str = "?"):
        self._fn = fn
        self.label = label
        self._cache: dict[int, Interval] = {}

    def enclose(self, prec: int) -> Interval:
        iv = self._cache.get(prec)
        if iv is None:
            iv = self._fn(prec)
            self._cache[prec] = iv
        return iv

    def sign(self) -> int:
        return resolve_sign(self)

    def __repr__(self) -> str:
        return f"NumericReal({self.label})"

    def __float__(self) -> float:
        return float(self.enclose(64))

    @staticmethod
    def lift(value) -> NumericReal:
        if isinstance(value, NumericReal):
            return value
        if isinstance(value, (int, Fraction)):
            return NumericReal(lambda p, v=value: Interval.point(v, p), str(value))
        if hasattr(value, "enclose"):
            return NumericReal(value.enclose, str(value))
        raise TypeError(f"cannot lift {type(value).__name__} to NumericReal")

    def _binary(self, other, op, sym: str, swap: bool = False) -> NumericReal:
        try:
            other = NumericReal.lift(other)
        except TypeError:
            return NotImplemented
        a, b = (other, self) if swap else (self, other)

        def fn(p: int) -> Interval:
            return op(a.enclose(p + GUARD_BITS), b.enclose(p + GUARD_BITS))

        return NumericReal(fn, f"({a.label}{sym}{b.label})")

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y, "+")

    def __radd__(self, other):
        return self._binary(other, lambda x, y: x + y, "+", swap=True)

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y, "-")

    def __rsub__(self, other):
        return self._binary(other, lambda x, y: x - y, "-", swap=True)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y, "*")

    def __rmul__(self, other):
        return self._binary(other, lambda x, y: x * y, "*", swap=True)

    def __truediv__(self, other):
        return self._binary(other, lambda x, y: x / y, "/")

    def __rtruediv__(self, other):
        return self._binary(other, lambda x, y: x / y, "/", swap=True)

    def __neg__(self):
        return NumericReal(lambda p: -self.enclose(p), f"-{self.label}")

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        return NumericReal(lambda p: self.enclose(p + GUARD_BITS * (abs(n) + 1)) ** n, f"{self.label}^{n}")


@lru_cache(maxsize=32)
def _e_interval(prec: int) -> Interval:
    target = Fraction(1, 1 << (prec + 2))
    total = Fraction(0)
    term = Fraction(1)
    k = 0
    while True:
        total += term
        k += 1
        term /= k
        # remaining tail < term * (k+1)/k
        if term * 2 < target:
            break
    return Interval.from_bounds(total, total + 2 * term, prec)


def _arctan_inv(x: int, target: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of arctan(1/x) by the alternating series."""
    total = Fraction(0)
    k = 0
    power = Fraction(1, x)
    while True:
        term = power / (2 * k + 1)
        if term < target:
            break
        total += term if k % 2 == 0 else -term
        power /= x * x
        k += 1
    # next omitted term has sign (-1)^k
    return (total, total + term) if k % 2 == 0 else (total - term, total)


@lru_cache(maxsize=32)
def _pi_interval(prec: int) -> Interval:
    target = Fraction(1, 1 << (prec + 8))
    a_lo, a_hi = _arctan_inv(5, target)
    b_lo, b_hi = _arctan_inv(239, target)
    return Interval.from_bounds(16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo, prec)


E = NumericReal(_e_interval, "e")
PI = NumericReal(_pi_interval, "pi")
