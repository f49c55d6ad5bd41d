"""High-precision toolkit for the Legendre elliptic family
Y^2 = X(X-1)(X-lambda): period lattices, elliptic logarithms, Betti
coordinates, integer-relation detection, heights, and parameter scans.
"""

from .betti import BettiCoords, BettiGrid, Region, betti_coords, betti_grid, wrap_unit
from .curve import (
    CurvePoint,
    LegendreCurve,
    O,
    add,
    division_poly_eval,
    division_poly_lambda,
    scalar_mul,
    to_weierstrass,
)
from .ellog import elliptic_log, exp_map, reduce_to_fundamental, weierstrass_p
from .errors import (
    DegenerateInputError,
    LegrelError,
    PathError,
    PoleError,
    PrecisionError,
    ResourceError,
)
from .heights import conjugate_audit, neron_tate, rational_point, weil_height
from .lattice import AlgebraicNumber, integer_relation, lll_reduce, recognize_algebraic
from .periods import PeriodPair, hypergeometric_F, period_pair
from .precision_core import Polynomial, eps, get_precision, poly_roots, set_precision
from .relations import (
    BoundSchema,
    RelationLattice,
    RelationVector,
    coefficient_bounds,
    relation_lattice,
    verify_relation,
)
from .scanner import (
    CountReport,
    IntersectionRecord,
    TorsionHit,
    count_rational_hits,
    emit_svg,
    torsion_scan,
    two_relation_scan,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicNumber", "BettiCoords", "BettiGrid", "BoundSchema", "CountReport",
    "CurvePoint", "DegenerateInputError", "IntersectionRecord", "LegendreCurve",
    "LegrelError", "O", "PathError", "PeriodPair", "PoleError", "Polynomial",
    "PrecisionError", "Region", "RelationLattice", "RelationVector",
    "ResourceError", "TorsionHit", "add", "betti_coords", "betti_grid",
    "coefficient_bounds", "conjugate_audit", "count_rational_hits",
    "division_poly_eval", "division_poly_lambda", "elliptic_log", "emit_svg",
    "eps", "exp_map", "get_precision", "hypergeometric_F", "integer_relation",
    "lll_reduce", "neron_tate", "period_pair", "poly_roots", "rational_point",
    "recognize_algebraic", "reduce_to_fundamental", "relation_lattice",
    "scalar_mul", "set_precision", "to_weierstrass", "torsion_scan",
    "two_relation_scan", "verify_relation", "weierstrass_p", "weil_height",
    "wrap_unit",
]
