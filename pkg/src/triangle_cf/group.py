"""The quaternion algebra (eta, eta | F), its Hurwitz order and the group
Delta(2,3,7) of norm-one units, realised as 2x2 matrices over L.

An element ``x0 + x1 i + x2 j + x3 k`` maps to ``[[z, eta*conj(w)], [w, conj(z)]]``
with ``z = x0 + x2 theta`` and ``w = x1 + x3 theta``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

from .tower import ETA, THETA, FElem, LElem

_ETA_L = ETA.to_L()

# order n_b with g_b^{n_b} = -1
_ORDERS = {2: 2, 3: 3, 7: 7}


# ---------------------------------------------------------------------------
# words in the generators


@dataclass(frozen=True)
class Word:
    """A signed product of powers of g2, g3, g7, kept syntactically reduced."""

    letters: tuple[tuple[int, int], ...] = ()
    sign: int = 1

    @classmethod
    def letter(cls, base: int, exp: int = 1) -> Word:
        return cls(((base, exp),)).normalized()

    def normalized(self) -> Word:
        sign = self.sign
        out: list[list[int]] = []
        for base, exp in self.letters:
            if out and out[-1][0] == base:
                out[-1][1] += exp
            else:
                out.append([base, exp])
            # reduce the tail repeatedly; merging may cascade after removals
            while out:
                b, e = out[-1]
                n = _ORDERS[b]
                q, r = divmod(e, n)
                # balanced remainder in (-n/2, n/2]
                if 2 * r > n:
                    r -= n
                    q += 1
                if q % 2:
                    sign = -sign
                if r == 0:
                    out.pop()
                    continue
                out[-1][1] = r
                if len(out) >= 2 and out[-2][0] == b:
                    prev = out.pop(-2)
                    out[-1][1] += prev[1]
                    continue
                break
        return Word(tuple((b, e) for b, e in out), sign)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters, self.sign * other.sign).normalized()

    def inverse(self) -> Word:
        return Word(tuple((b, -e) for b, e in reversed(self.letters)), self.sign).normalized()

    def __neg__(self) -> Word:
        return Word(self.letters, -self.sign)

    def __str__(self) -> str:
        body = " ".join(f"g{b}" if e == 1 else f"g{b}^{e}" for b, e in self.letters)
        if not body:
            return "1" if self.sign == 1 else "-1"
        return body if self.sign == 1 else f"-{body}"

    @classmethod
    def parse(cls, text: str) -> Word:
        """Parse ``g7^2 g2 g7^-2``-style words; a leading ``-`` negates."""
        s = text.strip()
        sign = 1
        if s.startswith("-"):
            sign, s = -1, s[1:].strip()
        if s in ("", "1"):
            return cls((), sign)
        letters = []
        pos = 0
        token = re.compile(r"\s*g([237])(?:\^\(?(-?\d+)\)?)?\s*")
        while pos < len(s):
            m = token.match(s, pos)
            if not m:
                raise ValueError(f"cannot parse word {text!r} at {s[pos:]!r}")
            letters.append((int(m.group(1)), int(m.group(2)) if m.group(2) else 1))
            pos = m.end()
        return cls(tuple(letters), sign).normalized()


# ---------------------------------------------------------------------------
# group elements


class GroupElement:
    """Matrix ``[[z, eta*conj(w)], [w, conj(z)]]`` over L, optionally with a word."""

    __slots__ = ("z", "w", "word")

    def __init__(self, z, w, word: Word | None = None):
        self.z = LElem.coerce(z)
        self.w = LElem.coerce(w)
        self.word = word

    # matrix entries
    @property
    def a(self) -> LElem:
        return self.z

    @property
    def b(self) -> LElem:
        return _ETA_L * self.w.conj()

    @property
    def c(self) -> LElem:
        return self.w

    @property
    def d(self) -> LElem:
        return self.z.conj()

    def entries(self) -> tuple[LElem, LElem, LElem, LElem]:
        return self.a, self.b, self.c, self.d

    def nrd(self) -> FElem:
        return (self.z * self.z.conj() - _ETA_L * self.w * self.w.conj()).even_part()

    def trd(self) -> FElem:
        return (self.z + self.z.conj()).even_part()

    def __mul__(self, other: GroupElement) -> GroupElement:
        z = self.z * other.z + _ETA_L * self.w.conj() * other.w
        w = self.w * other.z + self.z.conj() * other.w
        word = self.word * other.word if self.word is not None and other.word is not None else None
        return GroupElement(z, w, word)

    def inverse(self) -> GroupElement:
        if self.nrd() != 1:
            raise ValueError("inverse by adjugate requires reduced norm 1")
        word = self.word.inverse() if self.word is not None else None
        return GroupElement(self.z.conj(), -self.w, word)

    def __neg__(self) -> GroupElement:
        return GroupElement(-self.z, -self.w, -self.word if self.word is not None else None)

    def __pow__(self, n: int) -> GroupElement:
        base = self if n >= 0 else self.inverse()
        out = identity()
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.z == other.z and self.w == other.w

    def __hash__(self) -> int:
        return hash((self.z.key(), self.w.key()))

    def eq_up_to_sign(self, other: GroupElement) -> bool:
        return self == other or self == -other

    def is_scalar(self) -> bool:
        """True for +1 and -1 (the elements acting trivially)."""
        return self.w.is_zero() and self.z.in_F() and self.z.even_part().is_rational()

    def to_quat(self) -> QuatElem:
        return QuatElem(self.z.even_part(), self.w.even_part(), self.z.odd_part(), self.w.odd_part())

    def __repr__(self) -> str:
        tag = f" [{self.word}]" if self.word is not None else ""
        return f"GroupElement(z={self.z}, w={self.w}){tag}"


def identity() -> GroupElement:
    return GroupElement(1, 0, Word())


@lru_cache(maxsize=None)
def generators() -> tuple[GroupElement, GroupElement, GroupElement]:
    """``(g2, g3, g7)`` as exact matrices."""
    half = Fraction(1, 2)
    g2 = GroupElement(0, THETA.inv(), Word.letter(2))
    g3 = GroupElement(
        LElem.from_parts(half, (ETA * ETA - 2) * half),
        LElem.from_parts(0, (3 - ETA * ETA) * half),
        Word.letter(3),
    )
    g7 = GroupElement(
        LElem.from_parts((ETA * ETA + ETA - 1) * half),
        LElem.from_parts((2 - ETA * ETA) * half, (ETA * ETA + ETA - 2) * half),
        Word.letter(7),
    )
    return g2, g3, g7


def from_word(word: Word | str) -> GroupElement:
    if isinstance(word, str):
        word = Word.parse(word)
    gens = dict(zip((2, 3, 7), generators()))
    out = identity() if word.sign == 1 else -identity()
    for base, exp in word.letters:
        out = out * (gens[base] ** exp)
    out.word = word
    return out


DIGITS = (1, -1, 2, -2, 3, -3)


@lru_cache(maxsize=None)
def digit_matrix(i: int) -> GroupElement:
    """``A_i = g7^i g2`` for a balanced digit ``i`` in {+-1, +-2, +-3}."""
    if i not in DIGITS:
        raise ValueError(f"digit must be one of {DIGITS}, got {i}")
    g2, _, g7 = generators()
    out = (g7**i) * g2
    out.word = Word.letter(7, i) * Word.letter(2)
    return out


@dataclass(frozen=True)
class DigitConstants:
    """``g7^i g2 z = a_i - b_i / (c_i + z)`` for each digit ``i``."""

    a: dict
    b: dict
    c: dict

    def __getitem__(self, i: int) -> tuple[LElem, LElem, LElem]:
        return self.a[i], self.b[i], self.c[i]


@lru_cache(maxsize=None)
def constants() -> DigitConstants:
    a, b, c = {}, {}, {}
    for i in DIGITS:
        m = digit_matrix(i)
        lower_left = m.c
        a[i] = m.a / lower_left
        b[i] = (lower_left * lower_left).inv()
        c[i] = m.d / lower_left
    return DigitConstants(a, b, c)


def is_integral_L(x: LElem) -> bool:
    """x lies in the ring of integers of L: its relative trace and norm lie in Z[eta]."""
    return x.trace_to_F().is_integral() and x.norm_to_F().is_integral()


def is_unit_F(x) -> bool:
    x = LElem.coerce(x)
    if not x.in_F():
        return False
    f = x.even_part()
    return f.is_integral() and f.inv().is_integral()


def verify_constants() -> dict[str, bool]:
    """Exact checks of the structural properties of the digit constants."""
    K = constants()
    g2, _, g7 = generators()
    eta = ETA.to_L()
    # (2 cos(j pi / 7))^2 = 2 + 2 cos(2 j pi / 7), and 2 cos(2 j pi/7) for j = 1, 2, 3
    two_cos = {1: eta, 2: eta * eta - 2, 3: 1 - eta - eta * eta}
    checks = {}
    checks["a_is_g7j_0"] = all(
        (K.a[j] - (g7**j).b / (g7**j).d).is_zero() for j in DIGITS
    )
    checks["a_is_Aj_infinity"] = all((K.a[j] - digit_matrix(j).a / digit_matrix(j).c).is_zero() for j in DIGITS)
    checks["minus_c_is_conj_a"] = all((K.c[j] + K.a[j].conj()).is_zero() for j in DIGITS)
    checks["minus_c_is_Aj_inverse_infinity"] = all(
        (K.c[j] + digit_matrix(j).inverse().a / digit_matrix(j).inverse().c).is_zero() for j in DIGITS
    )
    checks["a_c_integral"] = all(is_integral_L(K.a[j]) and is_integral_L(K.c[j]) for j in DIGITS)
    checks["b_over_4_formula"] = all((K.b[j] / 4 * (2 + two_cos[abs(j)]) - eta).is_zero() for j in DIGITS)
    checks["b_over_4_unit"] = all(is_unit_F(K.b[j] / 4) for j in DIGITS)
    checks["symmetry"] = all(
        (K.a[-j] + K.a[j]).is_zero() and (K.b[-j] - K.b[j]).is_zero() and (K.c[-j] + K.c[j]).is_zero()
        for j in (1, 2, 3)
    )

    def sq(x):
        return x * x

    checks["ordering"] = (
        (sq(K.a[1]) - sq(K.a[2])).sign() < 0
        and (sq(K.a[2]) - eta).sign() < 0
        and (eta - sq(K.a[3])).sign() < 0
        and all((sq(K.a[j]) - sq(K.a[-j])).is_zero() for j in (1, 2, 3))
    )
    return checks


def is_hyperbolic(g: GroupElement) -> bool:
    t = g.trd()
    return (t * t - 4).sign() > 0


def balanced_digit(i: int) -> int:
    """Representative of a nonzero class mod 7 in {+-1, +-2, +-3}."""
    r = i % 7
    if r == 0:
        raise ValueError("digit 0 is not allowed")
    return r - 7 if r > 3 else r


# ---------------------------------------------------------------------------
# quaternions and the Hurwitz order


class QuatElem:
    """``x0 + x1 i + x2 j + x3 k`` with ``i^2 = j^2 = eta``, ``k = ij = -ji``."""

    __slots__ = ("x",)

    def __init__(self, x0=0, x1=0, x2=0, x3=0):
        self.x = tuple(FElem.coerce(v) for v in (x0, x1, x2, x3))

    def __add__(self, other: QuatElem) -> QuatElem:
        return QuatElem(*(p + q for p, q in zip(self.x, other.x)))

    def __sub__(self, other: QuatElem) -> QuatElem:
        return QuatElem(*(p - q for p, q in zip(self.x, other.x)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FElem)):
            s = FElem.coerce(other)
            return QuatElem(*(p * s for p in self.x))
        a0, a1, a2, a3 = self.x
        b0, b1, b2, b3 = other.x
        e, e2 = ETA, ETA * ETA
        # i^2 = j^2 = eta, k^2 = -eta^2, ij = k, jk = -eta i, ki = -eta j
        return QuatElem(
            a0 * b0 + e * a1 * b1 + e * a2 * b2 - e2 * a3 * b3,
            a0 * b1 + a1 * b0 - e * a2 * b3 + e * a3 * b2,
            a0 * b2 + a2 * b0 + e * a1 * b3 - e * a3 * b1,
            a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
        )

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, QuatElem) and self.x == other.x

    def __hash__(self) -> int:
        return hash(tuple(v.key() for v in self.x))

    def nrd(self) -> FElem:
        x0, x1, x2, x3 = self.x
        return x0 * x0 - ETA * x1 * x1 - ETA * x2 * x2 + ETA * ETA * x3 * x3

    def trd(self) -> FElem:
        return 2 * self.x[0]

    def to_group(self, word: Word | None = None) -> GroupElement:
        x0, x1, x2, x3 = self.x
        return GroupElement(LElem.from_parts(x0, x2), LElem.from_parts(x1, x3), word)

    def rational_coordinates(self) -> list[Fraction]:
        """Coordinates in the Q-basis eta^a * (1, i, j, k)[b], index 3*b + a."""
        return [q for v in self.x for q in v.coeffs]

    @classmethod
    def from_rational_coordinates(cls, coords: Sequence) -> QuatElem:
        return cls(*(FElem(coords[3 * b : 3 * b + 3]) for b in range(4)))

    def __repr__(self) -> str:
        return "QuatElem(" + ", ".join(str(v) for v in self.x) + ")"


QUAT_ONE = QuatElem(1)
QUAT_I = QuatElem(0, 1)
QUAT_J = QuatElem(0, 0, 1)
QUAT_K = QuatElem(0, 0, 0, 1)
QUAT_J_PRIME = QuatElem(Fraction(1, 2), ETA / 2, (1 + ETA + ETA * ETA) / 2)


def hermite_normal_form(rows: Iterable[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of an integer matrix (zero rows dropped)."""
    mat = [list(r) for r in rows if any(r)]
    if not mat:
        return []
    ncols = len(mat[0])
    out: list[list[int]] = []
    for col in range(ncols):
        active = [r for r in mat if r[col] != 0]
        rest = [r for r in mat if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        if active:
            piv = active[0]
            if piv[col] < 0:
                piv = [-x for x in piv]
            for k, prev in enumerate(out):
                q = prev[col] // piv[col]
                if q:
                    out[k] = [x - q * y for x, y in zip(prev, piv)]
            out.append(piv)
        mat = rest
    return out


class OrderLattice:
    """The Hurwitz order as a full-rank Z-lattice in Q^12, in Hermite normal form.

    Built by closing Z*1 under left multiplication by eta, i, j and j'.
    """

    GENERATORS = (QuatElem(ETA), QUAT_I, QUAT_J, QUAT_J_PRIME)

    def __init__(self):
        basis = [QUAT_ONE]
        while True:
            cand = list(basis)
            for g in self.GENERATORS:
                cand.extend(g * b for b in basis)
            denom, hnf = self._hnf_of(cand)
            new_basis = [QuatElem.from_rational_coordinates([Fraction(x, denom) for x in row]) for row in hnf]
            if len(new_basis) == len(basis) and set(new_basis) == set(basis):
                break
            basis = new_basis
        self.denominator = denom
        self.rows = hnf
        self.basis = basis

    @staticmethod
    def _hnf_of(elems: Sequence[QuatElem]) -> tuple[int, list[list[int]]]:
        coords = [e.rational_coordinates() for e in elems]
        denom = reduce(lambda a, b: a * b // math.gcd(a, b), (q.denominator for row in coords for q in row), 1)
        return denom, hermite_normal_form([[int(q * denom) for q in row] for row in coords])

    @property
    def rank(self) -> int:
        return len(self.rows)

    def contains(self, q: QuatElem) -> bool:
        vec = [x * self.denominator for x in q.rational_coordinates()]
        if any(v.denominator != 1 for v in vec):
            return False
        vec = [int(v) for v in vec]
        for row in self.rows:
            col = next(k for k, x in enumerate(row) if x)
            if vec[col] % row[col]:
                return False
            m = vec[col] // row[col]
            if m:
                vec = [x - m * y for x, y in zip(vec, row)]
        return not any(vec)


@lru_cache(maxsize=None)
def hurwitz_order() -> OrderLattice:
    return OrderLattice()


def in_order(q: QuatElem | GroupElement | FElem) -> bool:
    if isinstance(q, GroupElement):
        q = q.to_quat()
    elif not isinstance(q, QuatElem):
        q = QuatElem(q)
    return hurwitz_order().contains(q)
