"""Exception types raised across the package."""


class SurfaceError(ValueError):
    """Malformed or non-torus triangulation document."""


class DegenerateTriangleError(ValueError):
    """A spherical triangle violates the strict triangle inequalities."""


class GeometryError(ArithmeticError):
    """A trigonometric quantity left its admissible range or became non-finite."""


class FlipError(RuntimeError):
    """A flip was requested on an edge that cannot be flipped."""


class DomainError(RuntimeError):
    """Heights lie outside the admissible domain (no convex triangulation found)."""


class FlipBudgetError(DomainError):
    """The flip loop exceeded its budget without reaching a convex state."""


class LayoutError(RuntimeError):
    """The link could not be developed into a closed flat torus."""
