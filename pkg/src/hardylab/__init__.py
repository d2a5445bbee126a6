"""Numerical laboratory for multipolar Hardy/Poincare inequalities on hyperbolic space."""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    CurvatureModel,
    GeometryError,
    Point,
    TangentVector,
    exp_map,
    geodesic_distance,
    grad_dist,
    riemannian_inner,
    sphere_area,
)
