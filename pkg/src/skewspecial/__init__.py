"""Dickson polynomials, Ritt chains and special polynomial skew products."""

from .classify import (
    AffineTriangular,
    Classification,
    OneVarSpecialForm,
    classify_one_var,
    classify_skew,
    converse_fiber_test,
    multiplier_rationality_report,
)
from .dickson import chebyshev, dickson, dickson_at, dickson_specialize, pm_chebyshev_normal_form
from .numerics import EXACT, GaussianRational, ToleranceContext
from .parser import parse_map, parse_poly, parse_scalar
from .poly import AffineMap1, BiPoly, PlaneMap, Poly
from .ritt import compose_special_chain, decompose_special_chain, solve_affine_chain
from .skewdyn import (
    SkewProduct,
    base_periodic_points,
    fiber_iterate,
    fiber_periodic_points,
    multiplier_pair,
    verify_semiconjugacy,
)

__version__ = "0.1.0"
