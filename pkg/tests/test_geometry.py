"""Poses, polygons and ray casting."""

import math

import numpy as np
import pytest

from src.geometry.pose import Pose2D, compose_pose_arrays, wrap_angle, wrap_angles
from src.geometry.raycast import cast_ray_occupancy, cast_rays_occupancy, ray_polygon_hit, ray_segment_distances
from src.geometry.shapes import Polygon, Ray
from src.maps.occupancy import CellState, OccupancyGridMap
from src.utils.errors import GeometryError, InvalidArgumentError, OutOfBoundsError
from tests.conftest import make_grid


class TestWrapAngle:
    def test_wraps_into_half_open_interval(self):
        assert wrap_angle(6.0) == pytest.approx(6.0 - 2 * math.pi)
        assert wrap_angle(6.0) == pytest.approx(-0.28319, abs=1e-5)

    def test_positive_pi_maps_to_negative_pi(self):
        assert wrap_angle(math.pi) == -math.pi
        assert wrap_angle(-math.pi) == -math.pi

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(3)
        angles = rng.uniform(-50, 50, size=1000)
        wrapped = wrap_angles(angles)
        assert np.all(wrapped >= -math.pi) and np.all(wrapped < math.pi)
        np.testing.assert_allclose(wrapped, [wrap_angle(a) for a in angles], atol=1e-12)

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidArgumentError):
            wrap_angle(float("nan"))


class TestPose2D:
    def test_compose(self):
        pose = Pose2D(1.0, 0.0, math.pi / 2).compose(Pose2D(1.0, 0.0, 0.0))
        assert pose.x == pytest.approx(1.0)
        assert pose.y == pytest.approx(1.0)
        assert pose.theta == pytest.approx(math.pi / 2)

    def test_heading_is_wrapped(self):
        assert Pose2D(0.0, 0.0, 2.5 * math.pi).theta == pytest.approx(math.pi / 2)

    def test_transform_round_trip(self):
        pose = Pose2D(2.0, -1.0, 0.7)
        points = np.array([[0.0, 0.0], [1.0, 2.0], [-3.0, 0.5]])
        np.testing.assert_allclose(pose.inverse_transform_points(pose.transform_points(points)), points, atol=1e-12)

    def test_batch_compose_matches_scalar(self):
        offset = Pose2D(0.1, 0.2, 2.0)
        poses = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0], [-1.0, 4.0, -2.5]])
        batch = compose_pose_arrays(poses, offset)
        for row, p in zip(batch, poses):
            expected = Pose2D.from_sequence(p).compose(offset)
            np.testing.assert_allclose(row, expected.as_array(), atol=1e-12)


class TestPolygon:
    def test_rectangle_area_and_centroid(self):
        poly = Polygon.rectangle((3.0, 4.0), 2.0, 1.0, angle=0.3)
        assert poly.area == pytest.approx(2.0)
        np.testing.assert_allclose(poly.centroid(), [3.0, 4.0], atol=1e-12)

    def test_too_few_vertices(self):
        with pytest.raises(GeometryError):
            Polygon(((0.0, 0.0), (1.0, 0.0)))

    def test_zero_area(self):
        with pytest.raises(GeometryError):
            Polygon(((0.0, 0.0), (1.0, 0.0), (2.0, 0.0)))

    def test_self_intersecting(self):
        with pytest.raises(GeometryError):
            Polygon(((0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)))

    def test_contains_points(self):
        poly = Polygon.rectangle((0.0, 0.0), 2.0, 2.0)
        inside = poly.contains_points(np.array([[0.0, 0.0], [0.9, -0.9], [1.5, 0.0]]))
        assert inside.tolist() == [True, True, False]


def _per_edge_hit(ray: Ray, poly: Polygon):
    """Nearest crossing by solving each edge separately."""
    if poly.contains_points(np.array([ray.origin]))[0]:
        return 0.0
    origin, direction = np.array(ray.origin), np.array(ray.direction)
    best = math.inf
    for a, b in zip(*poly.edges()):
        edge = b - a
        system = np.array([[direction[0], -edge[0]], [direction[1], -edge[1]]])
        if abs(np.linalg.det(system)) < 1e-12:
            continue
        t, s = np.linalg.solve(system, a - origin)
        if t >= 0.0 and 0.0 <= s <= 1.0:
            best = min(best, float(t))
    return best if best <= ray.max_range else None


class TestRayPolygon:
    square = Polygon.rectangle((5.0, 0.0), 2.0, 2.0)

    def test_hit_distance(self):
        assert ray_polygon_hit(Ray.from_angle((0.0, 0.0), 0.0, 10.0), self.square) == pytest.approx(4.0)

    def test_origin_inside(self):
        assert ray_polygon_hit(Ray.from_angle((5.0, 0.0), 1.0, 10.0), self.square) == 0.0

    def test_miss_and_out_of_range(self):
        assert ray_polygon_hit(Ray.from_angle((0.0, 0.0), math.pi, 10.0), self.square) is None
        assert ray_polygon_hit(Ray.from_angle((0.0, 0.0), 0.0, 3.0), self.square) is None

    def test_segment_distances_shape(self):
        starts, ends = self.square.edges()
        origins = np.zeros((3, 2))
        dirs = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        t = ray_segment_distances(origins, dirs, starts, ends)
        assert t.shape == (3, 4)
        assert t[0].min() == pytest.approx(4.0)
        assert np.all(np.isinf(t[1])) and np.all(np.isinf(t[2]))

    def test_matches_per_edge_solve(self):
        rng = np.random.default_rng(21)
        l_shape = Polygon.from_points([(0, 0), (3, 0), (3, 1), (1, 1), (1, 3), (0, 3)])
        for _ in range(2000):
            if rng.random() < 0.5:
                poly = Polygon.rectangle(tuple(rng.uniform(-5, 5, 2)), rng.uniform(0.2, 4), rng.uniform(0.2, 4),
                                         rng.uniform(-math.pi, math.pi))
            else:
                poly = l_shape.translated(*rng.uniform(-5, 5, 2))
            ray = Ray.from_angle(tuple(rng.uniform(-10, 10, 2)), rng.uniform(-math.pi, math.pi), rng.uniform(1, 15))
            expected = _per_edge_hit(ray, poly)
            actual = ray_polygon_hit(ray, poly)
            if expected is None:
                assert actual is None
            else:
                assert actual == pytest.approx(expected, abs=1e-9)

    def test_translation_invariant(self):
        rng = np.random.default_rng(22)
        for _ in range(500):
            poly = Polygon.rectangle(tuple(rng.uniform(-5, 5, 2)), rng.uniform(0.2, 4), rng.uniform(0.2, 4),
                                     rng.uniform(-math.pi, math.pi))
            origin, angle, reach = rng.uniform(-10, 10, 2), rng.uniform(-math.pi, math.pi), rng.uniform(1, 15)
            dx, dy = rng.uniform(-50, 50, 2)
            hit = ray_polygon_hit(Ray.from_angle(tuple(origin), angle, reach), poly)
            moved = ray_polygon_hit(Ray.from_angle((origin[0] + dx, origin[1] + dy), angle, reach),
                                    poly.translated(dx, dy))
            if hit is None:
                assert moved is None
            else:
                assert moved == pytest.approx(hit, abs=1e-9)

    def test_invalid_ray(self):
        with pytest.raises(GeometryError):
            Ray((0.0, 0.0), (0.0, 0.0), 1.0)
        with pytest.raises(GeometryError):
            Ray.from_angle((0.0, 0.0), 0.0, 0.0)


class TestGridCasting:
    @pytest.fixture
    def column_grid(self) -> OccupancyGridMap:
        cells = make_grid(10, 10)
        cells[:, 5] = CellState.OCCUPIED
        return OccupancyGridMap(1.0, Pose2D(0.0, 0.0, 0.0), cells)

    def test_distance_to_hit_cell_center(self, column_grid):
        ray = Ray.from_angle((0.5, 5.5), 0.0, 20.0)
        assert cast_ray_occupancy(ray, column_grid) == pytest.approx(5.0)

    def test_no_hit_returns_max_range(self, column_grid):
        assert cast_ray_occupancy(Ray.from_angle((0.5, 5.5), math.pi, 3.0), column_grid) == pytest.approx(3.0)

    def test_origin_in_occupied_cell(self, column_grid):
        assert cast_ray_occupancy(Ray.from_angle((5.5, 5.5), 0.0, 3.0), column_grid) == 0.0

    def test_unknown_cells_do_not_block(self):
        cells = make_grid(10, 10)
        cells[:, 3] = CellState.UNKNOWN
        cells[:, 7] = CellState.OCCUPIED
        grid = OccupancyGridMap(1.0, Pose2D(0.0, 0.0, 0.0), cells)
        assert cast_ray_occupancy(Ray.from_angle((0.5, 5.5), 0.0, 20.0), grid) == pytest.approx(7.0)

    def test_origin_outside_grid(self, column_grid):
        with pytest.raises(OutOfBoundsError):
            cast_rays_occupancy(np.array([[-1.0, 5.0]]), np.array([[1.0, 0.0]]), 5.0, column_grid)
