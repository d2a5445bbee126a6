"""Closed-form scalar objects: spectral constants, singular potentials, weights.

Everything here is a pure function of (dimension, spectral shift, curvature,
distances).  Vectorized `*_field` variants operate on stacks of sheet
coordinates and back the quadrature layer; the scalar operations are the
contract-level API.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .geometry import (
    GeometryError,
    Point,
    distance_field,
    geodesic_distance,
    model_distance,
    model_distance_field,
)

__all__ = [
    "CoefficientError",
    "SpectralParams",
    "PoleConfig",
    "WeightDescriptor",
    "WEIGHT_KINDS",
    "PotentialConstants",
    "gamma_coefficient",
    "hardy_constants",
    "coth_deficit",
    "unipolar_radial",
    "unipolar_potential",
    "multipolar_potential",
    "multipolar_field",
    "ceiling_constant",
    "far_bound",
    "green_tail_integral",
    "green_log_gradient",
    "green_log_gradient_many",
    "critical_weight",
    "critical_weight_field",
    "pairwise_weight",
    "pairwise_weight_field",
]


class CoefficientError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralParams:
    """Dimension, spectral shift and curvature magnitude, with the validity window.

    The window n-2 <= lam <= (n-1)^2/4 is enforced by default.  ``allow_low_lambda``
    is an exploration escape hatch: lam < n-2 is accepted with a warning and the
    sinh^-2 coefficient goes negative.
    """

    n: int
    lam: float
    c: float = 1.0
    allow_low_lambda: bool = False

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 3:
            raise CoefficientError("dimension must be an integer >= 3")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise CoefficientError("curvature magnitude must be positive")
        if self.lam > self.poincare_constant + 1e-12:
            raise CoefficientError("above Poincare constant")
        if self.lam < self.n - 2 - 1e-12:
            if not self.allow_low_lambda:
                raise CoefficientError(
                    f"lam={self.lam} below n-2={self.n - 2}; "
                    "pass allow_low_lambda=True to explore this range"
                )
            warnings.warn(
                "lam below n-2: the sinh^-2 coefficient is negative", stacklevel=3
            )

    @property
    def poincare_constant(self) -> float:
        """Bottom of the L2 spectrum on the unit model: ((n-1)/2)^2."""
        return ((self.n - 1) / 2.0) ** 2


class PotentialConstants(tuple):
    """(dist_sq, sinh_sq, deficit): coefficients of 1/d^2, c/sinh^2(sqrt(c) d), g_c(d)."""

    __slots__ = ()

    def __new__(cls, dist_sq: float, sinh_sq: float, deficit: float):
        return super().__new__(cls, (dist_sq, sinh_sq, deficit))

    @property
    def dist_sq(self) -> float:
        return self[0]

    @property
    def sinh_sq(self) -> float:
        return self[1]

    @property
    def deficit(self) -> float:
        return self[2]


def gamma_coefficient(params: SpectralParams) -> float:
    """sqrt((n-1)^2 - 4 lam); lies in [0, n-3] on the validity window."""
    disc = (params.n - 1) ** 2 - 4.0 * params.lam
    if disc < 0.0:
        if disc < -1e-10:
            raise CoefficientError("above Poincare constant")
        disc = 0.0
    return math.sqrt(disc)


def hardy_constants(params: SpectralParams) -> PotentialConstants:
    """The three potential coefficients.

    dist_sq = (g+1)^2/4, sinh_sq = (n-1+g)(n-3-g)/4, deficit = g(g+1)/2 with
    g = gamma_coefficient.  On the window all are >= 0, and
    dist_sq + sinh_sq = (n-2)^2/4 identically (the near-pole mass).
    """
    g = gamma_coefficient(params)
    n = params.n
    return PotentialConstants(
        (g + 1.0) ** 2 / 4.0,
        (n - 1.0 + g) * (n - 3.0 - g) / 4.0,
        g * (g + 1.0) / 2.0,
    )


# -- the deficit function g_c(r) = (sqrt(c) r coth(sqrt(c) r) - 1) / r^2 ------

_DEFICIT_SWITCH = 0.5  # both branches agree to ~1e-15 here

# series for t cosh t - sinh t = sum_k (2k / (2k+1)!) t^(2k+1): positive terms,
# no cancellation; 12 terms reach machine precision for t <= 0.5
_DEFICIT_SERIES = np.array(
    [2.0 * k / math.factorial(2 * k + 1) for k in range(1, 13)]
)


def coth_deficit(r, c: float = 1.0):
    """g_c(r) = (sqrt(c) r coth(sqrt(c) r) - 1)/r^2, strictly positive and decreasing.

    For small arguments the numerator t cosh t - sinh t is evaluated by its
    positive-term series to avoid the catastrophic cancellation of the direct
    form; near r = 0 the value approaches c/3.
    """
    if not c > 0.0:
        raise CoefficientError("curvature magnitude must be positive")
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0.0):
        raise CoefficientError("the deficit function needs r > 0")
    t = math.sqrt(c) * r
    out = np.empty_like(t)
    small = t < _DEFICIT_SWITCH
    if np.any(small):
        ts = t[small]
        powers = ts[:, None] ** (2 * np.arange(1, 13) + 1)
        numerator = powers @ _DEFICIT_SERIES
        out[small] = c * numerator / (ts * ts * np.sinh(ts))
    if np.any(~small):
        tb = t[~small]
        out[~small] = c * (tb / np.tanh(tb) - 1.0) / (tb * tb)
    return float(out[0]) if scalar else out


def _potential_of_distance(params: SpectralParams, dist):
    """Potential value at model distance(s) dist: H/d^2 + C c/sinh^2(sqrt(c) d) + D g_c(d)."""
    consts = hardy_constants(params)
    d = np.asarray(dist, dtype=float)
    c = params.c
    value = consts.dist_sq / d**2
    if consts.sinh_sq != 0.0:
        value = value + consts.sinh_sq * c / np.sinh(math.sqrt(c) * d) ** 2
    if consts.deficit != 0.0:
        value = value + consts.deficit * coth_deficit(d, c)
    return value


def unipolar_radial(params: SpectralParams, scale: float = 1.0):
    """The single-pole potential as a radial function of the model distance."""

    def radial(r):
        return scale * _potential_of_distance(params, r)

    return radial


def unipolar_potential(params: SpectralParams, x0: Point, x: Point) -> float:
    """Single-pole potential at x; the pole itself is a genuine singularity."""
    dist = model_distance(x, x0, params.c)
    if dist == 0.0:
        raise CoefficientError("singular point")
    return float(_potential_of_distance(params, dist))


@dataclass(frozen=True)
class PoleConfig:
    """M >= 2 distinct poles plus the derived half-separation.

    The half-separation is half the minimum pairwise unit-model distance; it
    is always recomputed from the poles, and a caller-supplied value is only
    cross-checked (to 1e-12).
    """

    poles: tuple[Point, ...]
    d: float = field(default=None)  # type: ignore[assignment]

    def __init__(self, poles, d: float | None = None):
        poles = tuple(poles)
        if len(poles) < 2:
            raise CoefficientError("need at least two poles")
        derived = 0.5 * min(
            geodesic_distance(poles[i], poles[j])
            for i in range(len(poles))
            for j in range(i + 1, len(poles))
        )
        if derived <= 0.0:
            raise CoefficientError("poles must be pairwise distinct")
        if d is not None and abs(d - derived) > 1e-12:
            raise CoefficientError(
                f"supplied half-separation {d} does not match recomputed {derived}"
            )
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "d", derived)

    @property
    def count(self) -> int:
        return len(self.poles)

    def half_separation(self, c: float = 1.0) -> float:
        """Half-separation measured in the curvature -c model."""
        return self.d / math.sqrt(c)


def multipolar_field(params: SpectralParams, poles: PoleConfig, points: np.ndarray) -> np.ndarray:
    """Sum of single-pole potentials over a stack of sheet coordinates."""
    total = np.zeros(np.asarray(points).shape[0])
    for pole in poles.poles:
        dist = model_distance_field(points, pole, params.c)
        total = total + _potential_of_distance(params, dist)
    return total


def multipolar_potential(params: SpectralParams, poles: PoleConfig, x: Point) -> float:
    """Sum of single-pole potentials at x."""
    return float(
        sum(unipolar_potential(params, pole, x) for pole in poles.poles)
    )


def ceiling_constant(params: SpectralParams, d: float) -> float:
    """Half-separation evaluation controlling inter-pole interference.

    H/d^2 + C c/sinh^2(sqrt(c) d/2) + D g_c(d/2); an upper bound for the
    potential of one pole throughout the ball of radius d around another.
    """
    if not d > 0.0:
        raise CoefficientError("half-separation must be positive")
    consts = hardy_constants(params)
    c = params.c
    value = consts.dist_sq / d**2
    if consts.sinh_sq != 0.0:
        value += consts.sinh_sq * c / math.sinh(math.sqrt(c) * d / 2.0) ** 2
    if consts.deficit != 0.0:
        value += consts.deficit * coth_deficit(d / 2.0, c)
    return value


def far_bound(params: SpectralParams, d: float) -> float:
    """Potential value at model distance exactly d; bounds the potential beyond d.

    Each term decreases in distance, so this dominates the single-pole
    potential everywhere at distance >= d, and is itself dominated by
    ceiling_constant (strictly whenever the sinh^-2 or deficit coefficient
    is nonzero).
    """
    if not d > 0.0:
        raise CoefficientError("distance must be positive")
    return float(_potential_of_distance(params, d))


# -- Green function of the Laplacian and the associated critical weight ------

_GAUSS_NODES_16, _GAUSS_WEIGHTS_16 = leggauss(16)
_TAIL_MAX_PANELS = 64


def _green_tail_quadrature(n: int, d) -> np.ndarray:
    """Tail integral of sinh(s)^(1-n) from d to infinity by graded Gauss panels.

    The substitution t = exp(-s), xi = 1 - t maps the tail onto
    [xi_min, 1], xi_min = 1 - exp(-d), where the integrand is
    2^(n-1) (1-xi)^(n-2) (xi (2-xi))^(1-n).  Panels double geometrically away
    from the near-singular endpoint xi_min, so the panel layout adapts to d;
    16-point Gauss per panel leaves relative error far below 1e-10.
    """
    d = np.atleast_1d(np.asarray(d, dtype=float))
    xi_min = -np.expm1(-d)  # 1 - exp(-d), stable for small d
    # geometric breakpoints xi_min * 2^k clipped at 1; degenerate panels are width 0
    k = np.arange(_TAIL_MAX_PANELS + 1)
    brk = np.minimum(xi_min[:, None] * (2.0 ** k)[None, :], 1.0)
    lo = brk[:, :-1]
    hi = brk[:, 1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    # nodes: (len(d), panels, 16)
    xi = mid[:, :, None] + half[:, :, None] * _GAUSS_NODES_16[None, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = (1.0 - xi) ** (n - 2) * (xi * (2.0 - xi)) ** (1 - n)
    integrand = np.where(half[:, :, None] > 0.0, integrand, 0.0)
    panel_vals = np.sum(integrand * _GAUSS_WEIGHTS_16[None, None, :], axis=2) * half
    return 2.0 ** (n - 1) * np.sum(panel_vals, axis=1)


def _green_tail_recursion(n: int, d) -> np.ndarray:
    """Closed-form tail integral via the standard sinh-power reduction.

    T_1 = log(coth(d/2)), T_2 = coth(d) - 1,
    T_m = cosh(d) sinh(d)^(1-m)/(m-1) - (m-2)/(m-1) T_(m-2);
    independent of the quadrature path, used as its oracle.
    """
    d = np.atleast_1d(np.asarray(d, dtype=float))
    m = n - 1
    t_odd = -np.log(np.tanh(d / 2.0))
    t_even = np.exp(-d) / np.sinh(d)
    tails = {1: t_odd, 2: t_even}
    for k in range(3, m + 1):
        tails[k] = np.cosh(d) * np.sinh(d) ** (1 - k) / (k - 1) - (k - 2) / (
            k - 1
        ) * tails[k - 2]
    return tails[m]


def green_tail_integral(n: int, d, method: str = "auto") -> np.ndarray:
    """Integral of sinh(s)^(1-n) over [d, infinity), i.e. the Green function value.

    method "auto" uses the n = 3 closed form and graded-panel quadrature
    otherwise; "quadrature" forces the quadrature path (useful to cross-check
    the n = 3 closed form); "recursion" is the independent closed-form route.
    """
    if int(n) != n or n < 3:
        raise CoefficientError("dimension must be an integer >= 3")
    arr = np.atleast_1d(np.asarray(d, dtype=float))
    if np.any(arr <= 0.0):
        raise CoefficientError("distance must be positive")
    if method == "auto":
        if n == 3:
            # coth(d) - 1 in the cancellation-free form exp(-d)/sinh(d)
            out = np.exp(-arr) / np.sinh(arr)
        else:
            out = _green_tail_quadrature(n, arr)
    elif method == "quadrature":
        out = _green_tail_quadrature(n, arr)
    elif method == "recursion":
        out = _green_tail_recursion(n, arr)
    else:
        raise CoefficientError(f"unknown method {method!r}")
    return float(out[0]) if np.ndim(d) == 0 else out


def green_log_gradient_many(n: int, d, method: str = "auto") -> np.ndarray:
    """|grad G| / G for the Laplacian Green function: sinh(d)^(1-n) / tail integral."""
    arr = np.atleast_1d(np.asarray(d, dtype=float))
    tail = np.atleast_1d(green_tail_integral(n, arr, method=method))
    out = np.sinh(arr) ** (1 - n) / tail
    return out


def green_log_gradient(n: int, d: float, method: str = "auto") -> float:
    """Scalar contract for the Green log-gradient; behaves like (n-2)/d near the
    pole and tends to n-1 at infinity."""
    if not d > 0.0:
        raise CoefficientError("distance must be positive")
    return float(green_log_gradient_many(n, [d], method=method)[0])


WEIGHT_KINDS = ("unipolar", "multipolar", "pairwise", "green_critical")


@dataclass(frozen=True)
class WeightDescriptor:
    """Selects one of the implemented weights plus its parameters.

    alpha (only for green_critical) lists M+1 convex coefficients in (0, 1/2]
    summing to 1; None means the uniform choice 1/(M+1), for which the weight
    reduces to the explicit scalar-difference formula.
    """

    kind: str
    params: SpectralParams
    poles: PoleConfig | None = None
    pole: Point | None = None
    alpha: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in WEIGHT_KINDS:
            raise CoefficientError(f"unknown weight kind {self.kind!r}")
        if self.kind == "unipolar":
            if self.pole is None:
                raise CoefficientError("unipolar weight needs a pole")
        elif self.poles is None:
            raise CoefficientError(f"{self.kind} weight needs a pole configuration")
        if self.alpha is not None:
            if self.kind != "green_critical":
                raise CoefficientError("alpha applies only to the green_critical weight")
            alpha = tuple(float(a) for a in self.alpha)
            if len(alpha) != self.poles.count + 1:
                raise CoefficientError("alpha needs M+1 entries")
            if any(not (0.0 < a <= 0.5) for a in alpha):
                raise CoefficientError("alpha entries must lie in (0, 1/2]")
            if abs(sum(alpha) - 1.0) > 1e-12:
                raise CoefficientError("alpha entries must sum to 1")
            object.__setattr__(self, "alpha", alpha)


def critical_weight_field(
    params: SpectralParams,
    poles: PoleConfig,
    points: np.ndarray,
    alpha: tuple[float, ...] | None = None,
) -> np.ndarray:
    """Green-function critical weight on a stack of sheet coordinates.

    Uniform alpha: (M+1)^-2 [ sum_i rho_i^2 + sum_{i<j} (rho_i - rho_j)^2 ]
    with rho_i the Green log-gradient of the distance to pole i.  General
    alpha: sum over pairs of the gradient-difference form, where the cross
    terms carry the inner product of the distance gradients.
    """
    if params.c != 1.0:
        raise CoefficientError("the Green weight is defined on the unit model")
    n = params.n
    m = poles.count
    dists = np.stack([distance_field(points, p) for p in poles.poles])
    rho = np.stack([green_log_gradient_many(n, dists[i]) for i in range(m)])
    if alpha is None:
        total = np.sum(rho**2, axis=0)
        for i in range(m):
            for j in range(i + 1, m):
                total = total + (rho[i] - rho[j]) ** 2
        return total / (m + 1) ** 2
    from .geometry import distance_gradient_cos  # local import to keep module load light

    alpha = tuple(alpha)
    total = alpha[0] * np.sum(np.array(alpha[1:])[:, None] * rho**2, axis=0)
    for i in range(m):
        for j in range(i + 1, m):
            cos_ij = distance_gradient_cos(points, poles.poles[i], poles.poles[j])
            cross = rho[i] ** 2 + rho[j] ** 2 - 2.0 * rho[i] * rho[j] * cos_ij
            total = total + alpha[i + 1] * alpha[j + 1] * cross
    return total


def critical_weight(descriptor: WeightDescriptor, x: Point) -> float:
    """Scalar contract for the Green critical weight."""
    if descriptor.kind != "green_critical":
        raise CoefficientError("descriptor is not a green_critical weight")
    poles = descriptor.poles
    for pole in poles.poles:
        if geodesic_distance(x, pole) == 0.0:
            raise CoefficientError("weight is singular at a pole")
    return float(
        critical_weight_field(
            descriptor.params, poles, x.coords[None, :], alpha=descriptor.alpha
        )[0]
    )


def pairwise_weight_field(
    params: SpectralParams, poles: PoleConfig, points: np.ndarray
) -> np.ndarray:
    """Pairwise gradient-difference weight on a stack of sheet coordinates.

    (n-2)^2/M^2 sum_{i<j} |grad d_i/d_i - grad d_j/d_j|^2
      + (n-2)(n-1)/M sum_k g_c(d_k),
    with |grad d_i/d_i - grad d_j/d_j|^2 expanded through the eikonal identity
    as 1/d_i^2 + 1/d_j^2 - 2 <grad d_i, grad d_j>/(d_i d_j).
    """
    from .geometry import distance_gradient_cos

    n = params.n
    m = poles.count
    c = params.c
    dists = np.stack(
        [model_distance_field(points, p, c) for p in poles.poles]
    )
    total = np.zeros(dists.shape[1])
    for i in range(m):
        for j in range(i + 1, m):
            cos_ij = distance_gradient_cos(points, poles.poles[i], poles.poles[j])
            total = total + (
                1.0 / dists[i] ** 2
                + 1.0 / dists[j] ** 2
                - 2.0 * cos_ij / (dists[i] * dists[j])
            )
    total *= (n - 2.0) ** 2 / m**2
    deficit_sum = np.zeros(dists.shape[1])
    for k in range(m):
        deficit_sum = deficit_sum + coth_deficit(dists[k], c)
    return total + (n - 2.0) * (n - 1.0) / m * deficit_sum


def pairwise_weight(params: SpectralParams, poles: PoleConfig, x: Point) -> float:
    """Scalar contract for the pairwise gradient-difference weight."""
    for pole in poles.poles:
        if geodesic_distance(x, pole) == 0.0:
            raise CoefficientError("weight is singular at a pole")
    return float(pairwise_weight_field(params, poles, x.coords[None, :])[0])
