"""Camera rigs and simulated label visibility."""

import math

import numpy as np
import pytest

from src.detection.oracle import oracle_detect
from src.geometry.pose import Pose2D
from src.geometry.shapes import Polygon
from src.maps.footprint import LabeledFootprintMap, Landmark
from src.maps.occupancy import CellState, OccupancyGridMap
from src.mcl.evaluator import HypothesisEvaluator
from src.mcl.hypotheses import sample_uniform
from src.simworld.archetypes import rasterize_polygons
from src.utils.errors import InvalidArgumentError
from src.visibility.camera import CameraConfig, CameraRig, camera_world_pose
from src.visibility.simulator import OcclusionMode, VisibilitySimulator, simulate_visible
from tests.conftest import make_grid


class TestCameraRig:
    def test_default_rig(self, rig3):
        assert len(rig3) == 3
        yaws = [math.degrees(cam.offset_pose.theta) for cam in rig3.cameras]
        assert yaws == pytest.approx([0.0, 120.0, -120.0])
        assert all(cam.horizontal_fov_deg == 87.0 for cam in rig3.cameras)

    def test_ray_angles_cover_fov_edges(self):
        angles = CameraConfig(horizontal_fov_deg=90.0, ray_count=5).ray_angles()
        np.testing.assert_allclose(angles, np.radians([-45.0, -22.5, 0.0, 22.5, 45.0]))
        assert CameraConfig(ray_count=1).ray_angles().tolist() == [0.0]

    def test_empty_rig_rejected(self):
        with pytest.raises(ValueError):
            CameraRig(cameras=[])

    def test_camera_world_pose(self):
        cam = CameraConfig(mount_offset=(0.5, 0.0, math.pi / 2))
        pose = camera_world_pose(Pose2D(1.0, 1.0, math.pi / 2), cam)
        assert (pose.x, pose.y) == pytest.approx((1.0, 1.5))
        assert abs(pose.theta) == pytest.approx(math.pi)


class TestUnoccludedVisibility:
    def test_landmark_ahead_is_visible(self, forward_rig, two_shelf_map):
        result = simulate_visible(Pose2D(1.0, 5.0, 0.0), forward_rig, two_shelf_map)
        assert result.per_camera == (frozenset({"snack shelf"}),)

    def test_landmark_behind_is_not(self, forward_rig, two_shelf_map):
        result = simulate_visible(Pose2D(1.0, 5.0, math.pi), forward_rig, two_shelf_map)
        assert result.per_camera == (frozenset(),)

    def test_turning_changes_view(self, forward_rig, two_shelf_map):
        heading = math.atan2(3.5, 1.0)
        result = simulate_visible(Pose2D(1.0, 5.0, heading), forward_rig, two_shelf_map)
        assert result.per_camera == (frozenset({"drink shelf"}),)

    def test_beyond_max_range(self, two_shelf_map):
        rig = CameraRig(cameras=[CameraConfig(horizontal_fov_deg=90.0, max_range_m=3.0)])
        assert simulate_visible(Pose2D(1.0, 5.0, 0.0), rig, two_shelf_map).per_camera == (frozenset(),)

    def test_camera_inside_footprint(self, forward_rig, two_shelf_map):
        result = simulate_visible(Pose2D(7.0, 5.0, math.pi), forward_rig, two_shelf_map)
        assert "snack shelf" in result.per_camera[0]

    def test_sideways_camera(self, rig3):
        center = (5.0 + 5.0 * math.cos(math.radians(120)), 5.0 + 5.0 * math.sin(math.radians(120)))
        footprint_map = LabeledFootprintMap((Landmark("cart", Polygon.rectangle(center, 1.0, 1.0)),))
        result = simulate_visible(Pose2D(5.0, 5.0, 0.0), rig3, footprint_map)
        assert result.per_camera == (frozenset(), frozenset({"cart"}), frozenset())

    def test_shared_label_reported_once(self, forward_rig):
        footprint_map = LabeledFootprintMap((
            Landmark("shelf", Polygon.rectangle((5.0, 1.0), 1.0, 1.0)),
            Landmark("shelf", Polygon.rectangle((5.0, -1.0), 1.0, 1.0)),
        ))
        result = simulate_visible(Pose2D(0.0, 0.0, 0.0), forward_rig, footprint_map)
        assert result.per_camera == (frozenset({"shelf"}),)


class TestOccludedVisibility:
    @pytest.fixture
    def room(self, two_shelf_map) -> np.ndarray:
        cells = make_grid(20, 20, walls=True)
        rasterize_polygons(cells, [lm.footprint for lm in two_shelf_map.landmarks], 0.5)
        return cells

    def test_requires_grid(self, forward_rig, two_shelf_map):
        with pytest.raises(InvalidArgumentError):
            simulate_visible(Pose2D(1.0, 5.0, 0.0), forward_rig, two_shelf_map, OcclusionMode.GRID)

    def test_landmark_own_cells_do_not_hide_it(self, forward_rig, two_shelf_map, room):
        grid = OccupancyGridMap(0.5, Pose2D(0.0, 0.0, 0.0), room)
        result = simulate_visible(Pose2D(1.0, 5.0, 0.0), forward_rig, two_shelf_map, OcclusionMode.GRID, grid)
        assert result.per_camera == (frozenset({"snack shelf"}),)

    def test_wall_hides_landmark(self, forward_rig, two_shelf_map, room):
        room[1:-1, 8] = CellState.OCCUPIED
        grid = OccupancyGridMap(0.5, Pose2D(0.0, 0.0, 0.0), room)
        pose = Pose2D(1.0, 5.0, 0.0)
        assert simulate_visible(pose, forward_rig, two_shelf_map).per_camera == (frozenset({"snack shelf"}),)
        occluded = simulate_visible(pose, forward_rig, two_shelf_map, OcclusionMode.GRID, grid)
        assert occluded.per_camera == (frozenset(),)


class TestBatchSimulation:
    def test_batch_matches_single_pose(self, rig3, two_shelf_map, walled_grid):
        simulator = VisibilitySimulator(two_shelf_map, rig3, OcclusionMode.GRID, walled_grid)
        rng = np.random.default_rng(11)
        poses = np.column_stack([rng.uniform(1, 9, 40), rng.uniform(1, 9, 40), rng.uniform(-math.pi, math.pi, 40)])
        masks = simulator.simulate_masks(poses)
        assert masks.shape == (40, 3, 2)
        for pose, mask in zip(poses, masks):
            single = simulator.simulate(Pose2D.from_sequence(pose))
            assert simulator.masks_to_result(mask) == single

    def test_empty_map_sees_nothing(self, rig3):
        simulator = VisibilitySimulator(LabeledFootprintMap(()), rig3)
        assert simulator.simulate_masks(np.zeros((4, 3))).shape == (4, 3, 0)


class TestCameraOffTheMap:
    @pytest.fixture
    def open_grid(self) -> OccupancyGridMap:
        return OccupancyGridMap(0.5, Pose2D(0.0, 0.0, 0.0), make_grid(20, 20))

    def test_camera_outside_grid_sees_nothing(self, two_shelf_map, open_grid):
        rig = CameraRig(cameras=[CameraConfig(mount_offset=(-0.3, 0.0, 0.0), horizontal_fov_deg=90.0)])
        pose = Pose2D(0.1, 5.0, 0.0)
        assert simulate_visible(pose, rig, two_shelf_map).per_camera == (frozenset({"snack shelf"}),)
        occluded = simulate_visible(pose, rig, two_shelf_map, OcclusionMode.GRID, open_grid)
        assert occluded.per_camera == (frozenset(),)

    def test_offset_rig_over_free_poses(self, two_shelf_map, open_grid):
        rig = CameraRig(cameras=[CameraConfig(mount_offset=(0.3, 0.0, 0.0))])
        hyps = sample_uniform(open_grid, 2000, seed=0)
        evaluator = HypothesisEvaluator(two_shelf_map, rig, open_grid, occlusion=OcclusionMode.GRID, workers=1)
        obs = oracle_detect(Pose2D(1.0, 5.0, 0.0), rig, two_shelf_map)
        evaluated = evaluator.evaluate(hyps, obs)
        assert np.all(np.isfinite(evaluated.vision_ll))


def _random_scene(rng: np.random.Generator, count: int = 8) -> LabeledFootprintMap:
    vocabulary = ["shelf", "table", "cart", "fridge", "column"]
    return LabeledFootprintMap(tuple(
        Landmark(
            vocabulary[int(rng.integers(len(vocabulary)))],
            Polygon.rectangle(tuple(rng.uniform(2, 18, 2)), rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5),
                              rng.uniform(-math.pi, math.pi)),
        )
        for _ in range(count)
    ))


def _random_poses(rng: np.random.Generator, count: int = 50) -> np.ndarray:
    return np.column_stack([rng.uniform(0.5, 19.5, count), rng.uniform(0.5, 19.5, count),
                            rng.uniform(-math.pi, math.pi, count)])


def _is_subset(small: np.ndarray, large: np.ndarray) -> bool:
    return not np.any(small & ~large)


def _rig_with_rays(ray_count: int) -> CameraRig:
    return CameraRig(cameras=[
        CameraConfig(mount_offset=(0.0, 0.0, yaw), ray_count=ray_count)
        for yaw in (0.0, 2 * math.pi / 3, -2 * math.pi / 3)
    ])


class TestVisibilityProperties:
    def test_sparse_rays_see_subset_of_dense_cast(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            footprint_map, poses = _random_scene(rng), _random_poses(rng)
            sparse = VisibilitySimulator(footprint_map, _rig_with_rays(10)).simulate_masks(poses)
            dense = VisibilitySimulator(footprint_map, _rig_with_rays(1000)).simulate_masks(poses)
            assert _is_subset(sparse, dense)

    def test_monotone_in_ray_count(self):
        rng = np.random.default_rng(32)
        for _ in range(30):
            footprint_map, poses = _random_scene(rng), _random_poses(rng)
            # 19 evenly spaced angles include the 10 of the sparser fan
            coarse = VisibilitySimulator(footprint_map, _rig_with_rays(10)).simulate_masks(poses)
            finer = VisibilitySimulator(footprint_map, _rig_with_rays(19)).simulate_masks(poses)
            assert _is_subset(coarse, finer)

    def test_rotation_equivariant(self):
        rng = np.random.default_rng(33)
        rig = _rig_with_rays(10)
        for _ in range(30):
            footprint_map, poses = _random_scene(rng), _random_poses(rng)
            phi = rng.uniform(-math.pi, math.pi)
            rotated_map = LabeledFootprintMap(tuple(
                Landmark(lm.label, lm.footprint.rotated(phi)) for lm in footprint_map.landmarks
            ))
            c, s = math.cos(phi), math.sin(phi)
            rotated_poses = np.column_stack([
                c * poses[:, 0] - s * poses[:, 1],
                s * poses[:, 0] + c * poses[:, 1],
                poses[:, 2] + phi,
            ])
            original = VisibilitySimulator(footprint_map, rig).simulate_masks(poses)
            turned = VisibilitySimulator(rotated_map, rig).simulate_masks(rotated_poses)
            np.testing.assert_array_equal(original, turned)

    def test_occluded_is_subset_of_unoccluded(self):
        rng = np.random.default_rng(34)
        rig = _rig_with_rays(10)
        for _ in range(30):
            footprint_map, poses = _random_scene(rng), _random_poses(rng)
            cells = make_grid(40, 40, walls=True)
            rasterize_polygons(cells, [lm.footprint for lm in footprint_map.landmarks], 0.5)
            grid = OccupancyGridMap(0.5, Pose2D(0.0, 0.0, 0.0), cells)
            plain = VisibilitySimulator(footprint_map, rig).simulate_masks(poses)
            occluded = VisibilitySimulator(footprint_map, rig, OcclusionMode.GRID, grid).simulate_masks(poses)
            assert _is_subset(occluded, plain)
