"""Convex polyhedral cusps from spherical cone metrics on the torus.

The input is a geodesic triangulation of the Gauss image with spherical
edge lengths.  Heights of the face planes are found by maximizing a
concave functional whose gradient is the vector of curvatures; the
solution's link is a circle pattern on a flat torus.
"""

from .cusp import (
    CuspState,
    DualTesselation,
    build_state,
    curvatures,
    dihedral_angles,
    dual_tesselation,
    edge_is_bad,
    flip,
    flip_feasible,
    make_convex,
)
from .errors import (
    DegenerateTriangleError,
    DomainError,
    FlipBudgetError,
    FlipError,
    GeometryError,
    LayoutError,
    SurfaceError,
)
from .functional import CurvatureHessian, concavity_report, gradient, hessian, value
from .pattern import CirclePattern, emit_svg, layout, link_triangles
from .solver import SolveOptions, SolveResult, gauge_fix, newton_solve, ricci_flow_solve, solve
from .surface import (
    SphericalConeTorus,
    Triangulation,
    ValidationReport,
    check_acute_vertex_condition,
    cone_angles,
    load_surface,
    parse_surface,
    triangle_angles,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "CirclePattern",
    "CurvatureHessian",
    "CuspState",
    "DegenerateTriangleError",
    "DomainError",
    "DualTesselation",
    "FlipBudgetError",
    "FlipError",
    "GeometryError",
    "LayoutError",
    "SolveOptions",
    "SolveResult",
    "SphericalConeTorus",
    "SurfaceError",
    "Triangulation",
    "ValidationReport",
    "build_state",
    "check_acute_vertex_condition",
    "concavity_report",
    "cone_angles",
    "curvatures",
    "dihedral_angles",
    "dual_tesselation",
    "edge_is_bad",
    "emit_svg",
    "flip",
    "flip_feasible",
    "gauge_fix",
    "gradient",
    "hessian",
    "layout",
    "link_triangles",
    "load_surface",
    "make_convex",
    "newton_solve",
    "parse_surface",
    "ricci_flow_solve",
    "solve",
    "triangle_angles",
    "validate",
    "value",
]
