import math

import numpy as np
import pytest

from hardylab.geometry import (
    CurvatureModel,
    GeometryError,
    Point,
    TangentVector,
    batch_exp,
    distance_field,
    distance_gradient_cos,
    equidistant_poles,
    exp_map,
    geodesic_distance,
    grad_dist,
    model_distance,
    point_along,
    random_tangent_directions,
    rescale_to_curvature,
    riemannian_inner,
    sphere_area,
    tangent_frame,
    warning_counters,
)


def geodesic_point(t, dim=4):
    coords = np.zeros(dim + 1)
    coords[0] = math.cosh(t)
    coords[1] = math.sinh(t)
    return Point(coords)


def random_point(rng, dim=4, rmax=2.5):
    origin = Point.origin(dim)
    direction = random_tangent_directions(origin, 1, rng)[0]
    return exp_map(origin, TangentVector(origin, direction), rng.uniform(0.0, rmax))


class TestPoint:
    def test_normalization(self):
        p = Point(2.0 * np.array([math.cosh(1.3), math.sinh(1.3), 0.0, 0.0]))
        assert abs(-(-p.coords[0] ** 2 + np.sum(p.coords[1:] ** 2)) - 1.0) < 1e-12
        assert p.coords[0] >= 1.0

    def test_rejects_lower_sheet_and_spacelike(self):
        with pytest.raises(GeometryError):
            Point(np.array([-1.0, 0.0, 0.0, 0.0]))
        with pytest.raises(GeometryError):
            Point(np.array([0.5, 2.0, 0.0, 0.0]))


class TestDistance:
    def test_identity(self):
        p = Point.origin(4)
        assert geodesic_distance(p, p) == 0.0

    def test_unit_speed_parametrization(self):
        assert geodesic_distance(geodesic_point(1.0), Point.origin(4)) == pytest.approx(1.0, abs=1e-12)

    def test_opposite_sides_of_geodesic(self):
        x = geodesic_point(2.0)
        coords = np.zeros(5)
        coords[0] = math.cosh(1.0)
        coords[1] = -math.sinh(1.0)
        y = Point(coords)
        assert geodesic_distance(x, y) == pytest.approx(3.0, abs=1e-12)

    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(7)
        slack_min = 0.0
        for _ in range(1000):
            a, b, c = (random_point(rng) for _ in range(3))
            dab = geodesic_distance(a, b)
            assert dab == pytest.approx(geodesic_distance(b, a), abs=1e-12)
            slack = geodesic_distance(a, c) + geodesic_distance(c, b) - dab
            slack_min = min(slack_min, slack)
        assert slack_min >= -1e-10

    def test_reverse_triangle(self):
        # d(x, y2) >= d(y1, y2) - d(x, y1)
        rng = np.random.default_rng(8)
        for _ in range(300):
            x, y1, y2 = (random_point(rng) for _ in range(3))
            assert geodesic_distance(x, y2) >= geodesic_distance(y1, y2) - geodesic_distance(x, y1) - 1e-10

    def test_clamp_counter(self):
        warning_counters.reset()
        p = Point.origin(3)
        # a raw row slightly off the sheet in the timelike direction has a
        # strictly negative chordal square against p, forcing the clamp path
        off_sheet = p.coords.copy()
        off_sheet[0] *= 1.0 + 1e-13
        distance_field(np.stack([off_sheet, off_sheet]), p)
        assert warning_counters.acosh_clamps >= 2
        assert distance_field(off_sheet[None, :], p)[0] == 0.0


class TestGradDist:
    def test_unit_norm_random(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            x, z = random_point(rng), random_point(rng)
            if geodesic_distance(x, z) == 0.0:
                continue
            assert abs(grad_dist(x, z).riemannian_norm() - 1.0) <= 1e-10

    def test_along_geodesic_is_unit_tangent(self):
        x, z = geodesic_point(1.7), geodesic_point(0.4)
        v = grad_dist(x, z)
        expected = np.zeros(5)
        expected[0] = math.sinh(1.7)
        expected[1] = math.cosh(1.7)
        assert np.allclose(v.components, expected, atol=1e-12)

    def test_self_inner_product(self):
        rng = np.random.default_rng(12)
        x, z = random_point(rng), random_point(rng)
        v = grad_dist(x, z)
        assert riemannian_inner(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_opposite_at_midpoint(self):
        z1, z2 = geodesic_point(-1.5), geodesic_point(1.5)
        mid = Point.origin(4)
        g1, g2 = grad_dist(mid, z1), grad_dist(mid, z2)
        assert riemannian_inner(g1, g2) == pytest.approx(-1.0, abs=1e-12)

    def test_error_at_pole(self):
        p = Point.origin(3)
        with pytest.raises(GeometryError):
            grad_dist(p, p)


class TestExpMap:
    def test_zero_distance(self):
        p = geodesic_point(0.8)
        frame = tangent_frame(p)
        v = TangentVector(p, frame[0])
        q = exp_map(p, v, 0.0)
        assert geodesic_distance(p, q) == pytest.approx(0.0, abs=1e-12)

    def test_explicit_geodesic(self):
        origin = Point.origin(4)
        direction = np.zeros(5)
        direction[1] = 1.0
        q = exp_map(origin, TangentVector(origin, direction), 1.0)
        assert q.coords[0] == pytest.approx(math.cosh(1.0), abs=1e-12)
        assert q.coords[1] == pytest.approx(math.sinh(1.0), abs=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            x = random_point(rng)
            v = TangentVector(x, random_tangent_directions(x, 1, rng)[0])
            r = rng.uniform(0.0, 3.5)
            assert geodesic_distance(x, exp_map(x, v, r)) == pytest.approx(r, abs=1e-10)


class TestSphereArea:
    @pytest.mark.parametrize(
        "n,expected",
        [(2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2)],
    )
    def test_values(self, n, expected):
        assert sphere_area(n) == pytest.approx(expected, rel=1e-14)

    def test_rejects_small(self):
        with pytest.raises(GeometryError):
            sphere_area(1)


class TestRescale:
    def test_identity_at_unit_curvature(self):
        m = CurvatureModel(1.0)
        assert rescale_to_curvature(m, "distance", 2.3) == 2.3
        assert rescale_to_curvature(m, "gradient", 1.0) == 1.0
        r = 0.7
        assert rescale_to_curvature(m, "volume_factor", r, dimension=4) == pytest.approx(
            math.sinh(r) ** 3, rel=1e-14
        )

    def test_distance_scaling(self):
        assert rescale_to_curvature(CurvatureModel(4.0), "distance", 1.0) == pytest.approx(0.5)

    def test_flat_limit_of_volume_factor(self):
        m = CurvatureModel(1e-6)
        r = np.linspace(0.05, 1.0, 40)
        got = rescale_to_curvature(m, "volume_factor", r, dimension=5)
        flat = r**4
        assert np.max(np.abs(got / flat - 1.0)) <= 1e-3

    def test_unknown_kind(self):
        with pytest.raises(GeometryError):
            rescale_to_curvature(CurvatureModel(1.0), "torsion", 1.0)


class TestBatchKernels:
    def test_eikonal_via_cos_identity(self):
        rng = np.random.default_rng(21)
        y = random_point(rng)
        pts = np.stack([random_point(rng).coords for _ in range(200)])
        cos_self = distance_gradient_cos(pts, y, y)
        d = distance_field(pts, y)
        assert np.all(np.abs(cos_self[d > 1e-6] - 1.0) <= 1e-10)

    def test_batch_exp_matches_scalar(self):
        rng = np.random.default_rng(22)
        x = random_point(rng)
        dirs = random_tangent_directions(x, 16, rng)
        pts = batch_exp(x, dirs, 1.3)
        for i in range(16):
            q = exp_map(x, TangentVector(x, dirs[i]), 1.3)
            assert np.allclose(pts[i], q.coords, atol=1e-12)

    def test_gradient_cos_matches_explicit(self):
        rng = np.random.default_rng(23)
        x, y, z = random_point(rng), random_point(rng), random_point(rng)
        expected = riemannian_inner(grad_dist(x, y), grad_dist(x, z))
        got = distance_gradient_cos(x.coords[None, :], y, z)[0]
        assert got == pytest.approx(expected, abs=1e-9)


class TestPolePlacement:
    @pytest.mark.parametrize("m", [2, 3])
    def test_pairwise_distances(self, m):
        poles = equidistant_poles(4, m, 5.0)
        for i in range(m):
            for j in range(i + 1, m):
                assert geodesic_distance(poles[i], poles[j]) == pytest.approx(5.0, abs=1e-10)

    def test_model_distance(self):
        poles = equidistant_poles(3, 2, 4.0)
        assert model_distance(poles[0], poles[1], c=4.0) == pytest.approx(2.0, abs=1e-12)

    def test_point_along(self):
        a, b = equidistant_poles(3, 2, 6.0)
        mid = point_along(a, b, 3.0)
        assert geodesic_distance(mid, a) == pytest.approx(3.0, abs=1e-10)
        assert geodesic_distance(mid, b) == pytest.approx(3.0, abs=1e-10)
