"""Numerical toolkit for sigma_k-power curvature flows of spacelike graphs in Minkowski space.

Submodules: ``symfunc`` (speeds), ``geometry`` (curvature of graphs and their
Legendre duals), ``legendre`` (convex conjugates), ``flow`` (explicit solvers),
``expander`` (radial self-expanders), ``diagnostics`` (monitors) and ``cli``.
"""

from .errors import CFLViolation, ConeError, ConvexityError, DomainError, SpacelikeError, TraceUnstable
from .geometry import BallField2D, GridField2D, RadialField
from .symfunc import SpeedParams, sigma, speed_F_alpha, speed_F_star

__version__ = "0.1.0"

__all__ = [
    "BallField2D", "CFLViolation", "ConeError", "ConvexityError", "DomainError", "GridField2D",
    "RadialField", "SpacelikeError", "SpeedParams", "TraceUnstable", "sigma", "speed_F_alpha",
    "speed_F_star",
]
