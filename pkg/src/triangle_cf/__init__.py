"""Geodesic continued fractions for the (2,3,7) triangle group.

Exact arithmetic in Q(eta) and Q(sqrt(eta)), the Hurwitz quaternion order and
its norm-one group, reduction of oriented geodesics against the fundamental
heptagon, and the digit expansion with periodicity detection and extraction
of fundamental relative units.
"""

from .engine import (
    ExpansionResult,
    QuadraticInput,
    Unit,
    cf_coefficients,
    cf_terms,
    convergent,
    expand,
    from_quadratic,
    fundamental_unit,
    render_cf,
    rho_alpha,
)
from .expr import ParseError, parse
from .geometry import INFINITY, OrientedGeodesic, exit_edge, initial_reduce, is_reduced
from .group import GroupElement, Word, constants, digit_matrix, from_word, generators, in_order
from .numerics import E, PI, Interval, NumericReal, PrecisionExhausted
from .tower import ETA, THETA, FElem, LElem, QuadRealElem

__all__ = [
    "E",
    "ETA",
    "ExpansionResult",
    "FElem",
    "GroupElement",
    "INFINITY",
    "Interval",
    "LElem",
    "NumericReal",
    "OrientedGeodesic",
    "PI",
    "ParseError",
    "PrecisionExhausted",
    "QuadRealElem",
    "QuadraticInput",
    "THETA",
    "Unit",
    "Word",
    "cf_coefficients",
    "cf_terms",
    "constants",
    "convergent",
    "digit_matrix",
    "exit_edge",
    "expand",
    "from_quadratic",
    "from_word",
    "fundamental_unit",
    "generators",
    "in_order",
    "initial_reduce",
    "is_reduced",
    "parse",
    "render_cf",
    "rho_alpha",
]
