"""Oriented geodesics in the upper half-plane and the fundamental heptagon.

The heptagon has vertices ``V_k = g7^k tau3`` (k mod 7); its edge ``e_k`` runs
from ``V_k`` to ``V_{k+1}`` along the geodesic joining ``g7^k(-theta)`` and
``g7^k(theta)``.  Half-open conventions: ``e_k`` keeps ``V_k`` and drops
``V_{k+1}``; ``e'_k`` keeps ``V_{k+1}`` and drops ``V_k``.

All predicates are evaluated exactly when the endpoints are exact and through
certified enclosures otherwise.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import mpmath

from .group import GroupElement, balanced_digit, generators, identity
from .numerics import NumericReal
from .tower import ETA, THETA, LElem, QuadRealElem

log = logging.getLogger(__name__)

_ETA_L = ETA.to_L()


class _Infinity:
    __slots__ = ()

    def __repr__(self) -> str:
        return "oo"

    __str__ = __repr__

    def key(self) -> tuple:
        return ("oo",)

    def __reduce__(self):
        return "INFINITY"


INFINITY = _Infinity()

BoundaryPoint = Union[_Infinity, LElem, QuadRealElem, NumericReal]


class BudgetExhausted(RuntimeError):
    """A search or expansion ran out of its step budget."""


def as_point(p) -> BoundaryPoint:
    if p is INFINITY or isinstance(p, (LElem, QuadRealElem, NumericReal)):
        return p
    if isinstance(p, str) and p in ("oo", "inf", "infinity"):
        return INFINITY
    return LElem.coerce(p)


def is_exact(p) -> bool:
    return not isinstance(p, NumericReal)


def sign(x) -> int:
    if isinstance(x, int):
        return (x > 0) - (x < 0)
    return x.sign()


@dataclass(frozen=True)
class OrientedGeodesic:
    """The geodesic from ``beta`` (repelling) to ``alpha`` (attracting)."""

    beta: BoundaryPoint
    alpha: BoundaryPoint

    def __post_init__(self):
        object.__setattr__(self, "beta", as_point(self.beta))
        object.__setattr__(self, "alpha", as_point(self.alpha))
        a, b = self.alpha, self.beta
        if a is INFINITY and b is INFINITY:
            raise ValueError("endpoints must differ")
        if a is not INFINITY and b is not INFINITY and is_exact(a) and is_exact(b) and (a - b).is_zero():
            raise ValueError("endpoints must differ")

    @property
    def exact(self) -> bool:
        return is_exact(self.alpha) and is_exact(self.beta)

    def key(self) -> tuple:
        return (self.beta.key(), self.alpha.key())

    def transform(self, g: GroupElement) -> OrientedGeodesic:
        return OrientedGeodesic(mobius(g, self.beta), mobius(g, self.alpha))

    def __str__(self) -> str:
        return f"{self.beta} -> {self.alpha}"


def mobius(g: GroupElement, p: BoundaryPoint) -> BoundaryPoint:
    """Linear fractional action on the boundary, with the usual conventions at oo."""
    a, b, c, d = g.entries()
    if p is INFINITY:
        return INFINITY if c.is_zero() else a / c
    if isinstance(p, NumericReal):
        return (a * p + b) / (c * p + d)
    den = c * p + d
    if den.is_zero():
        return INFINITY
    return (a * p + b) / den


# ---------------------------------------------------------------------------
# heptagon data


@dataclass(frozen=True)
class Vertex:
    """A point of the upper half-plane by real part and squared modulus."""

    x: LElem
    n: LElem

    def complex(self, dps: int = 30) -> mpmath.mpc:
        with mpmath.workdps(dps):
            x, n = _mp(self.x, dps), _mp(self.n, dps)
            return mpmath.mpc(x, mpmath.sqrt(n - x * x))


def _mp(v, dps: int):
    iv = v.enclose(int(dps * 3.4) + 16)
    m = iv.midpoint
    return mpmath.mpf(m.numerator) / m.denominator


def fixed_point(g: GroupElement) -> Vertex:
    """Fixed point in the upper half-plane of an elliptic element."""
    a, b, c, d = g.entries()
    if c.is_zero():
        raise ValueError("elliptic element with vanishing lower-left entry")
    return Vertex((a - d) / (2 * c), -b / c)


@dataclass(frozen=True)
class HeptagonData:
    vertices: tuple[Vertex, ...]  # V_k = g7^k tau3
    u: tuple[LElem, ...]  # g7^k(-theta)
    v: tuple[LElem, ...]  # g7^k(theta)
    tau7: Vertex
    tau2: Vertex
    center_side: tuple[int, ...]  # side of tau7 w.r.t. edge geodesic k


@lru_cache(maxsize=None)
def heptagon() -> HeptagonData:
    g2, g3, g7 = generators()
    verts, us, vs = [], [], []
    rot = identity()
    for k in range(7):
        conj = rot * g3 * rot.inverse()
        verts.append(fixed_point(conj))
        u = mobius(rot, -THETA)
        v = mobius(rot, THETA)
        if u is INFINITY or v is INFINITY:
            raise RuntimeError(f"edge geodesic {k} has an infinite endpoint")
        us.append(u)
        vs.append(v)
        rot = rot * g7
    tau7 = fixed_point(g7)
    tau2 = fixed_point(g2)
    sides = tuple(sign(tau7.n - (u + v) * tau7.x + u * v) for u, v in zip(us, vs))
    return HeptagonData(tuple(verts), tuple(us), tuple(vs), tau7, tau2, sides)


# ---------------------------------------------------------------------------
# side tests


def _side_function(geo: OrientedGeodesic):
    """Vertex -> side of ``geo``, with the symmetric functions of the endpoints precomputed.

    For a semicircle: sign of (squared distance to centre - radius^2).
    For a vertical line at x0: sign of (x - x0).
    """
    a, b = geo.alpha, geo.beta
    if a is INFINITY or b is INFINITY:
        x0 = b if a is INFINITY else a
        return lambda V: sign(V.x - x0)
    s, p = _simplify(a + b), _simplify(a * b)
    return lambda V: sign(V.n - s * V.x + p)


def _simplify(x):
    # conjugate pairs have symmetric functions in L; drop the sqrt(D) part
    if isinstance(x, QuadRealElem) and x.v.is_zero():
        return x.u
    return x


def side_of_vertex(vertex: Vertex, geo: OrientedGeodesic) -> int:
    """Which side of ``geo`` the vertex lies on; 0 exactly when it lies on it."""
    return _side_function(geo)(vertex)


def _boundary_side(p, u: LElem, v: LElem) -> int:
    if p is INFINITY:
        return 1
    return sign((p - u) * (p - v))


def _before(geo: OrientedGeodesic, p: Vertex, q: Vertex) -> bool:
    """True when p comes strictly before q along geo (both lie on geo)."""
    a, b = geo.alpha, geo.beta
    if a is INFINITY:
        return sign(p.n - q.n) < 0
    if b is INFINITY:
        return sign(p.n - q.n) > 0
    forward = sign(a - b)
    return sign(p.x - q.x) * forward < 0


@dataclass(frozen=True)
class Crossing:
    """Where ``geo`` meets the heptagon: entry edge ``e_entry``, exit ``e'_exit``."""

    entry: int
    exit: int
    through_interior: bool


def crossing(geo: OrientedGeodesic) -> Crossing | None:
    """Entry/exit half-open edges of ``geo`` through the heptagon, or None."""
    hep = heptagon()
    side = _side_function(geo)
    signs = [side(V) for V in hep.vertices]
    zeros = [k for k, s in enumerate(signs) if s == 0]

    def is_entry_edge(m: int) -> bool:
        s = _boundary_side(geo.beta, hep.u[m], hep.v[m])
        if s == 0:
            raise RuntimeError("repelling endpoint on an edge geodesic crossed in its interior")
        return s != hep.center_side[m]

    if not zeros:
        changes = [k for k in range(7) if signs[k] != signs[(k + 1) % 7]]
        if not changes:
            return None
        if len(changes) != 2:
            raise RuntimeError(f"inconsistent side signs {signs}")
        k1, k2 = changes
        if is_entry_edge(k1):
            return Crossing(k1, k2, True)
        return Crossing(k2, k1, True)

    if len(zeros) == 1:
        k = zeros[0]
        path = [(k + j) % 7 for j in range(1, 7)]
        changes = [path[j] for j in range(5) if signs[path[j]] != signs[path[j + 1]]]
        if not changes:
            # touches the heptagon only at V_k
            return Crossing(k, (k - 1) % 7, False)
        m = changes[0]
        if is_entry_edge(m):
            return Crossing(m, (k - 1) % 7, True)
        return Crossing(k, m, True)

    if len(zeros) == 2:
        k, m = zeros
        if (k + 1) % 7 == m or (m + 1) % 7 == k:
            lo = k if (k + 1) % 7 == m else m  # the edge is lo -> lo+1
            hi = (lo + 1) % 7
            if _before(geo, hep.vertices[lo], hep.vertices[hi]):
                return Crossing(lo, lo, False)
            return Crossing(hi, (lo - 1) % 7, False)
        first, second = (k, m) if _before(geo, hep.vertices[k], hep.vertices[m]) else (m, k)
        return Crossing(first, (second - 1) % 7, True)

    raise RuntimeError(f"geodesic meets {len(zeros)} vertices of the heptagon")


def alpha_inside(geo: OrientedGeodesic) -> bool:
    """|alpha| < sqrt(eta), strictly."""
    a = geo.alpha
    if a is INFINITY:
        return False
    return sign(a * a - _ETA_L) < 0


def is_reduced(geo: OrientedGeodesic) -> bool:
    if not alpha_inside(geo):
        return False
    c = crossing(geo)
    return c is not None and c.entry == 0


def exit_edge(geo: OrientedGeodesic) -> int:
    """The balanced digit i with ``geo`` leaving the heptagon through ``e'_i``."""
    c = crossing(geo)
    if c is None or c.entry != 0 or not alpha_inside(geo):
        raise ValueError(f"geodesic {geo} is not reduced")
    return balanced_digit(c.exit)


# ---------------------------------------------------------------------------
# initial reduction

_GUIDE_DPS = 30  # about 100 bits


def _float_point(p, dps: int = _GUIDE_DPS):
    if p is INFINITY:
        return None
    return _mp(p, dps)


def _apex(geo: OrientedGeodesic) -> mpmath.mpc:
    a, b = _float_point(geo.alpha), _float_point(geo.beta)
    theta = mpmath.sqrt(2 * mpmath.cos(2 * mpmath.pi / 7))
    if a is None or b is None:
        x0 = b if a is None else a
        return mpmath.mpc(x0, max(2 * theta, 1 + abs(x0)))
    return mpmath.mpc((a + b) / 2, abs(a - b) / 2)


def _act(g: GroupElement, z: mpmath.mpc) -> mpmath.mpc:
    a, b, c, d = (_mp(e, _GUIDE_DPS) for e in g.entries())
    return (a * z + b) / (c * z + d)


def _dist_key(z: mpmath.mpc, w: mpmath.mpc) -> mpmath.mpf:
    # monotone in hyperbolic distance
    return abs(z - w) ** 2 / (z.imag * w.imag)


@lru_cache(maxsize=None)
def _pairings() -> tuple[GroupElement, ...]:
    """``g7^k g2`` for k = 0..6: maps the heptagon to its neighbour across e_k."""
    g2, _, g7 = generators()
    return tuple((g7 ** balanced_digit(k) if k else identity()) * g2 for k in range(7))


def _finish(geo: OrientedGeodesic, T: GroupElement) -> GroupElement | None:
    """Given T with T.geo meeting the heptagon, rotate and correct to reduced."""
    g2, g3, g7 = generators()
    moved = geo.transform(T)
    c = crossing(moved)
    if c is None:
        return None
    rot = g7 ** (-balanced_digit(c.entry)) if c.entry else identity()
    for corr in (identity(), g3, g3.inverse()):
        cand = corr * rot * T
        if is_reduced(geo.transform(cand)):
            return cand
    return None


def initial_reduce(geo: OrientedGeodesic, budget: int = 10_000) -> GroupElement:
    """Some B0 in the group with ``B0^{-1} geo`` reduced (identity when already reduced)."""
    if is_reduced(geo):
        return identity()
    with mpmath.workdps(_GUIDE_DPS):
        hep = heptagon()
        t7 = hep.tau7.complex(_GUIDE_DPS)
        pair = _pairings()
        neighbours = [_act(p, t7) for p in pair]
        z = _apex(geo)
        T = identity()
        steps = 0
        while True:
            best, best_k = _dist_key(z, t7), None
            for k, nb in enumerate(neighbours):
                dk = _dist_key(z, nb)
                if dk < best * (1 - mpmath.mpf(10) ** -20):
                    best, best_k = dk, k
            if best_k is None:
                break
            inv = pair[best_k].inverse()
            z = _act(inv, z)
            T = inv * T
            steps += 1
            if steps > budget:
                raise BudgetExhausted("greedy point reduction did not settle")

    found = _finish(geo, T)
    if found is not None:
        return found.inverse()
    log.debug("greedy reduction missed the heptagon; searching nearby tiles")
    pair_inv = [p.inverse() for p in _pairings()]
    tried = 0
    for depth in range(1, 4):
        for seq in itertools.product(range(7), repeat=depth):
            cand = T
            for k in seq:
                cand = pair_inv[k] * cand
            found = _finish(geo, cand)
            tried += 1
            if found is not None:
                return found.inverse()
            if tried > budget:
                raise BudgetExhausted("no reducing element found within budget")
    raise BudgetExhausted("no reducing element found near the guided point")
