"""Exact geometry on the upper hyperboloid sheet {<x,x>_L = -1, x0 > 0}.

All distances, distance gradients, geodesics and volume factors used anywhere
in the package come from this module.  The model has constant curvature -1;
spaces of curvature -c are handled by rescaling unit-model quantities (see
``rescale_to_curvature`` and ``model_distance``) instead of a separate chart,
because every downstream formula depends on c only through sqrt(c) * distance.

Points are renormalized onto the sheet after every arithmetic construction to
defeat drift.  Near-coincident point pairs (which arise routinely in Monte
Carlo sampling) clamp the arccosh argument at 1 and bump a warning counter
rather than failing.

Ambient coordinates grow like cosh(distance to the coordinate origin), so
rounding in Minkowski products grows like exp(2R) for points R away from the
origin.  Keep working regions within ~6 units of the origin for 1e-10 level
geometry; all bundled experiments do.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

POINT_NORM_TOL = 1e-12
TANGENT_ORTHO_TOL = 1e-10

__all__ = [
    "GeometryError",
    "Point",
    "TangentVector",
    "CurvatureModel",
    "warning_counters",
    "minkowski_dot",
    "geodesic_distance",
    "model_distance",
    "grad_dist",
    "riemannian_inner",
    "exp_map",
    "sphere_area",
    "rescale_to_curvature",
    "tangent_frame",
    "random_tangent_directions",
    "batch_exp",
    "distance_field",
    "model_distance_field",
    "distance_gradient_cos",
    "direction_toward",
    "point_along",
    "equidistant_poles",
]


class GeometryError(ValueError):
    """Raised for inputs that leave the model (wrong sheet, non-tangent vectors, ...)."""


class _WarningCounters:
    """Thread-safe counters for numeric clamps that are tolerated rather than fatal."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.acosh_clamps = 0

    def count_acosh_clamp(self, n: int = 1) -> None:
        if n:
            with self._lock:
                self.acosh_clamps += n

    def reset(self) -> None:
        with self._lock:
            self.acosh_clamps = 0


warning_counters = _WarningCounters()


def minkowski_dot(a, b):
    """Minkowski pairing -a0*b0 + sum_i ai*bi over the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.sum(a[..., 1:] * b[..., 1:], axis=-1) - a[..., 0] * b[..., 0]


@dataclass(frozen=True, eq=False)
class Point:
    """A point on the upper hyperboloid sheet.

    Coordinates are ambient Minkowski coordinates with the time-like component
    first.  The constructor renormalizes so that <x,x>_L = -1 holds to machine
    precision and rejects coordinates that are not timelike or lie on the
    lower sheet.
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        raw = np.asarray(self.coords, dtype=float)
        if raw.ndim != 1 or raw.size < 3:
            raise GeometryError("a point needs at least 3 ambient coordinates")
        if not np.all(np.isfinite(raw)):
            raise GeometryError("non-finite coordinates")
        # compensated accumulation: the pairing cancels badly for large coords
        norm_sq = -math.fsum([-raw[0] * raw[0], *(v * v for v in raw[1:])])
        if norm_sq <= 0.0:
            raise GeometryError("coordinates are not timelike")
        if raw[0] <= 0.0:
            raise GeometryError("point lies on the lower hyperboloid sheet")
        fixed = raw / math.sqrt(norm_sq)
        fixed.flags.writeable = False
        object.__setattr__(self, "coords", fixed)

    @property
    def dimension(self) -> int:
        """Intrinsic dimension N (ambient dimension minus one)."""
        return self.coords.size - 1

    @staticmethod
    def origin(dimension: int) -> "Point":
        coords = np.zeros(dimension + 1)
        coords[0] = 1.0
        return Point(coords)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Point({np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector Minkowski-orthogonal to its base point (i.e. tangent to the sheet)."""

    base: Point
    components: np.ndarray

    def __post_init__(self) -> None:
        comps = np.asarray(self.components, dtype=float)
        if comps.shape != self.base.coords.shape:
            raise GeometryError("tangent components must match the base point shape")
        if abs(minkowski_dot(comps, self.base.coords)) > TANGENT_ORTHO_TOL:
            raise GeometryError("vector is not tangent to the hyperboloid at its base")
        comps = comps.copy()
        comps.flags.writeable = False
        object.__setattr__(self, "components", comps)

    def riemannian_norm(self) -> float:
        return math.sqrt(max(minkowski_dot(self.components, self.components), 0.0))


@dataclass(frozen=True)
class CurvatureModel:
    """Constant sectional curvature -c with c > 0."""

    c: float

    def __post_init__(self) -> None:
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise GeometryError("curvature magnitude c must be positive and finite")


def geodesic_distance(x: Point, y: Point) -> float:
    """Geodesic distance on the unit-curvature model, arccosh(-<x,y>_L).

    Evaluated in the equivalent chordal form 2*asinh(|x - y|_L / 2), which is
    exact at coincident points instead of losing half the digits.  Rounding
    can push the chordal square slightly negative for near-coincident points
    (the arccosh-argument-below-1 failure mode); it is clamped at 0 and
    counted, never fatal.
    """
    diff = x.coords - y.coords
    chord_sq = minkowski_dot(diff, diff)
    if chord_sq < 0.0:
        warning_counters.count_acosh_clamp()
        chord_sq = 0.0
    return 2.0 * math.asinh(0.5 * math.sqrt(chord_sq))


def model_distance(x: Point, y: Point, c: float = 1.0) -> float:
    """Distance in the curvature -c model (unit-model distance divided by sqrt(c))."""
    return geodesic_distance(x, y) / math.sqrt(c)


def distance_field(points: np.ndarray, y: Point) -> np.ndarray:
    """Unit-model distances from an (n, N+1) stack of sheet coordinates to y."""
    diff = np.asarray(points, dtype=float) - y.coords
    chord_sq = minkowski_dot(diff, diff)
    low = chord_sq < 0.0
    n_low = int(np.count_nonzero(low))
    if n_low:
        warning_counters.count_acosh_clamp(n_low)
        chord_sq = np.where(low, 0.0, chord_sq)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(chord_sq))


def model_distance_field(points: np.ndarray, y: Point, c: float = 1.0) -> np.ndarray:
    return distance_field(points, y) / math.sqrt(c)


def grad_dist(x: Point, z: Point) -> TangentVector:
    """Riemannian gradient at x of the distance to z: (cosh(d) x - z) / sinh(d).

    Unit vector pointing away from z along the connecting geodesic.
    """
    dist = geodesic_distance(x, z)
    if dist == 0.0:
        raise GeometryError("gradient undefined at pole")
    comps = (math.cosh(dist) * x.coords - z.coords) / math.sinh(dist)
    # re-project and re-normalize: defeats rounding drift for close pairs
    comps = comps + minkowski_dot(comps, x.coords) * x.coords
    norm = math.sqrt(max(minkowski_dot(comps, comps), 0.0))
    if norm == 0.0:
        raise GeometryError("gradient numerically degenerate (points too close)")
    return TangentVector(x, comps / norm)


def riemannian_inner(u: TangentVector, v: TangentVector) -> float:
    """Inner product of tangent vectors at a shared base point.

    The Minkowski pairing restricted to a tangent space is positive definite,
    so this is the Riemannian metric.
    """
    if not np.allclose(u.base.coords, v.base.coords, rtol=0.0, atol=1e-12):
        raise GeometryError("tangent vectors have different base points")
    return float(minkowski_dot(u.components, v.components))


def exp_map(x: Point, v: TangentVector, r: float) -> Point:
    """Point at distance r from x along the unit tangent direction v."""
    if r < 0.0:
        raise GeometryError("exp_map takes a nonnegative distance")
    norm = v.riemannian_norm()
    if abs(norm - 1.0) > 1e-6:
        raise GeometryError("exp_map needs a unit tangent vector")
    return Point(math.cosh(r) * x.coords + math.sinh(r) * v.components)


def sphere_area(dimension: int) -> float:
    """Surface measure of the unit (N-1)-sphere in R^N: 2 pi^(N/2) / Gamma(N/2)."""
    if int(dimension) != dimension or dimension < 2:
        raise GeometryError("sphere_area needs an integer dimension >= 2")
    n = int(dimension)
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def rescale_to_curvature(model: CurvatureModel, kind: str, value, dimension: int | None = None):
    """Map unit-model quantities to the curvature -c model.

    kind "distance":      lengths scale by 1/sqrt(c).
    kind "gradient":      |grad d| = 1 is preserved, so gradient magnitudes pass through.
    kind "volume_factor": radius r maps to the polar volume factor
                          (sinh(sqrt(c) r)/sqrt(c))^(N-1); needs ``dimension``.
    """
    c = model.c
    if kind == "distance":
        return np.asarray(value, dtype=float) / math.sqrt(c) if np.ndim(value) else value / math.sqrt(c)
    if kind == "gradient":
        return value
    if kind == "volume_factor":
        if dimension is None:
            raise GeometryError("volume_factor rescaling needs the dimension")
        r = np.asarray(value, dtype=float)
        out = (np.sinh(math.sqrt(c) * r) / math.sqrt(c)) ** (dimension - 1)
        return float(out) if np.ndim(value) == 0 else out
    raise GeometryError(f"unknown quantity kind: {kind!r}")


def tangent_frame(x: Point) -> np.ndarray:
    """Minkowski-orthonormal basis of the tangent space at x, shape (N, N+1).

    Gram-Schmidt over the projected ambient basis; the pairing is positive
    definite on the tangent space, so the procedure is stable.
    """
    dim = x.dimension
    basis: list[np.ndarray] = []
    for j in range(dim + 1):
        cand = np.zeros(dim + 1)
        cand[j] = 1.0
        cand = cand + minkowski_dot(cand, x.coords) * x.coords
        for e in basis:
            cand = cand - minkowski_dot(cand, e) * e
        norm_sq = minkowski_dot(cand, cand)
        if norm_sq > 1e-10:
            basis.append(cand / math.sqrt(norm_sq))
        if len(basis) == dim:
            break
    if len(basis) < dim:
        raise GeometryError("failed to build a tangent frame")
    return np.array(basis)


def random_tangent_directions(x: Point, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, N+1) stack of unit tangent vectors at x, uniform on the sphere."""
    frame = tangent_frame(x)
    gauss = rng.standard_normal((count, x.dimension))
    norms = np.linalg.norm(gauss, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return (gauss / norms) @ frame


def batch_exp(center: Point, directions: np.ndarray, r: float) -> np.ndarray:
    """exp_map applied to a stack of unit directions at a shared center.

    Returns raw sheet coordinates (renormalized), not Point objects, for speed.
    """
    pts = math.cosh(r) * center.coords + math.sinh(r) * directions
    norm_sq = -minkowski_dot(pts, pts)
    return pts / np.sqrt(norm_sq)[..., None]


def distance_gradient_cos(points: np.ndarray, y: Point, z: Point, eps: float = 1e-14) -> np.ndarray:
    """Pointwise <grad d(.,y), grad d(.,z)> on a stack of sheet coordinates.

    Uses the product form (cosh dy cosh dz - cosh d(y,z)) / (sinh dy sinh dz),
    so no tangent vectors are materialized.  Values are clipped to [-1, 1];
    entries where a distance vanishes are ill-defined and returned as 0 (they
    sit on a measure-zero set and callers mask them).
    """
    py = -minkowski_dot(points, y.coords)
    pz = -minkowski_dot(points, z.coords)
    pyz = -minkowski_dot(y.coords, z.coords)
    den_sq = (py * py - 1.0) * (pz * pz - 1.0)
    ok = den_sq > eps
    den = np.sqrt(np.where(ok, den_sq, 1.0))
    out = np.where(ok, (py * pz - pyz) / den, 0.0)
    return np.clip(out, -1.0, 1.0)


def direction_toward(x: Point, y: Point) -> TangentVector:
    """Unit tangent at x pointing toward y (opposite of grad_dist(x, y))."""
    g = grad_dist(x, y)
    return TangentVector(x, -g.components)


def point_along(x: Point, y: Point, t: float) -> Point:
    """Point at distance t from x on the geodesic through x and y (t may exceed d(x,y))."""
    return exp_map(x, direction_toward(x, y), t)


def equidistant_poles(dimension: int, count: int, separation: float) -> list[Point]:
    """count >= 2 points with all pairwise unit-model distances equal to ``separation``.

    Built as a regular simplex of directions around the origin; requires
    count <= dimension so the simplex fits in the spatial factor.
    """
    if count < 2:
        raise GeometryError("need at least two poles")
    if count > dimension:
        raise GeometryError("equidistant placement needs count <= dimension")
    if separation <= 0.0:
        raise GeometryError("separation must be positive")
    # unit vectors in R^count with pairwise dot -1/(count-1), spanning count-1 dims
    raw = np.eye(count) - 1.0 / count
    raw /= np.linalg.norm(raw[0])
    # radius so that two directions at angle theta give the target separation:
    # cosh(sep) = cosh^2(rho) - sinh^2(rho) cos(theta), cos(theta) = -1/(count-1)
    sh_sq = (math.cosh(separation) - 1.0) * (count - 1) / count
    rho = math.asinh(math.sqrt(sh_sq))
    origin = Point.origin(dimension)
    poles = []
    for i in range(count):
        direction = np.zeros(dimension + 1)
        direction[1 : count + 1] = raw[i]
        poles.append(exp_map(origin, TangentVector(origin, direction), rho))
    return poles
