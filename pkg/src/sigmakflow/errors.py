"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class ConeError(ArithmeticError):
    """Curvature vector left the admissible (Garding) cone."""


class SpacelikeError(ArithmeticError):
    """Discrete gradient reached the light cone.

    ``point`` holds the grid index (or coordinates) of the offending point.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConvexityError(ArithmeticError):
    """Field is not (strictly) convex where convexity is required."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class CFLViolation(ValueError):
    """Requested step exceeds the explicit stability bound.

    ``required_dt`` is the largest admissible step for the current state.
    """

    def __init__(self, message, required_dt):
        super().__init__(message)
        self.required_dt = required_dt


class TraceUnstable(UserWarning):
    """Boundary extrapolation from the outer rings is inconsistent."""
