"""Simulated landmark visibility from pose hypotheses."""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Optional, Tuple

import numpy as np

from src.geometry.pose import Pose2D, compose_pose_arrays
from src.geometry.raycast import cast_rays_occupancy, ray_segment_distances
from src.maps.footprint import LabeledFootprintMap
from src.maps.occupancy import OccupancyGridMap
from src.utils.errors import InvalidArgumentError
from src.visibility.camera import CameraRig


class OcclusionMode(str, Enum):
    NONE = "none"
    GRID = "grid-occluded"


@dataclass(frozen=True)
class VisibilityResult:
    """Label sets each camera should see, indexed like the rig."""

    per_camera: Tuple[FrozenSet[str], ...]

    def __len__(self) -> int:
        return len(self.per_camera)


class VisibilitySimulator:
    """
    Vectorized visibility kernel for one (map, rig, occlusion) combination.

    Edges of all footprints are packed once; :meth:`simulate_masks` then
    evaluates any number of poses as a (K, N, L) boolean tensor where L
    indexes ``footprint_map.labels``.
    """

    def __init__(
        self,
        footprint_map: LabeledFootprintMap,
        rig: CameraRig,
        occlusion: OcclusionMode = OcclusionMode.NONE,
        grid: Optional[OccupancyGridMap] = None,
    ):
        occlusion = OcclusionMode(occlusion)
        if occlusion is OcclusionMode.GRID and grid is None:
            raise InvalidArgumentError("grid-occluded visibility requires an occupancy grid")

        self.footprint_map = footprint_map
        self.rig = rig
        self.occlusion = occlusion
        self.grid = grid
        self.labels = footprint_map.labels

        starts, ends, owner = [], [], []
        for index, landmark in enumerate(footprint_map.landmarks):
            a, b = landmark.footprint.edges()
            starts.append(a)
            ends.append(b)
            owner.extend([index] * len(a))
        if starts:
            self._seg_starts = np.concatenate(starts)
            self._seg_ends = np.concatenate(ends)
        else:
            self._seg_starts = np.empty((0, 2))
            self._seg_ends = np.empty((0, 2))
        owner = np.asarray(owner, dtype=np.intp)
        # edges are contiguous per landmark, so reduceat can group them
        self._edge_group_starts = np.searchsorted(owner, np.arange(len(footprint_map.landmarks)))

        self._landmark_labels = np.zeros((len(footprint_map.landmarks), len(self.labels)), dtype=bool)
        for index, landmark in enumerate(footprint_map.landmarks):
            self._landmark_labels[index, footprint_map.label_index[landmark.label]] = True
        self._paths = [landmark.footprint.path() for landmark in footprint_map.landmarks]

    @property
    def camera_count(self) -> int:
        return len(self.rig.cameras)

    def simulate_masks(self, poses: np.ndarray) -> np.ndarray:
        """
        Visible-label masks for a batch of robot poses.

        Args:
            poses: (K, 3) robot poses (x, y, theta)

        Returns:
            (K, N, L) boolean array
        """
        poses = np.asarray(poses, dtype=np.float64).reshape(-1, 3)
        count = poses.shape[0]
        n_labels = len(self.labels)
        masks = np.zeros((count, self.camera_count, n_labels), dtype=bool)
        if count == 0 or n_labels == 0:
            return masks

        for cam_index, cam in enumerate(self.rig.cameras):
            cam_poses = compose_pose_arrays(poses, cam.offset_pose)
            offsets = cam.ray_angles()
            n_rays = offsets.size
            headings = cam_poses[:, 2:3] + offsets[None, :]
            directions = np.stack([np.cos(headings), np.sin(headings)], axis=-1).reshape(-1, 2)
            origins = np.repeat(cam_poses[:, :2], n_rays, axis=0)

            t = ray_segment_distances(origins, directions, self._seg_starts, self._seg_ends)
            per_landmark = np.minimum.reduceat(t, self._edge_group_starts, axis=1)

            # a camera inside a footprint sees that landmark on every ray
            for lm_index, path in enumerate(self._paths):
                inside = path.contains_points(cam_poses[:, :2])
                if np.any(inside):
                    per_landmark[np.repeat(inside, n_rays), lm_index] = 0.0

            reach = np.full(origins.shape[0], cam.max_range)
            if self.occlusion is OcclusionMode.GRID:
                on_grid = self.grid.contains_grid_coords(self.grid.world_to_grid(origins))
                blocked = cast_rays_occupancy(origins[on_grid], directions[on_grid], cam.max_range, self.grid)
                # one cell of tolerance: the grid reports occupied cell centers
                reach[on_grid] = np.minimum(reach[on_grid], blocked + self.grid.resolution)
                # a camera mounted off the map sees nothing
                reach[~on_grid] = -1.0

            hits = per_landmark <= reach[:, None]
            label_hits = hits @ self._landmark_labels
            masks[:, cam_index, :] = label_hits.reshape(count, n_rays, n_labels).any(axis=1)
        return masks

    def masks_to_result(self, mask: np.ndarray) -> VisibilityResult:
        """Convert one (N, L) mask into label sets."""
        return VisibilityResult(tuple(
            frozenset(self.labels[j] for j in np.flatnonzero(row)) for row in mask
        ))

    def simulate(self, pose: Pose2D) -> VisibilityResult:
        return self.masks_to_result(self.simulate_masks(pose.as_array()[None, :])[0])


def simulate_visible(
    pose: Pose2D,
    rig: CameraRig,
    footprint_map: LabeledFootprintMap,
    occlusion: OcclusionMode = OcclusionMode.NONE,
    grid: Optional[OccupancyGridMap] = None,
) -> VisibilityResult:
    """
    Labels each camera should see from ``pose``.

    Args:
        pose: Robot pose hypothesis
        rig: Camera rig
        footprint_map: Labeled footprint map
        occlusion: ``none`` or ``grid-occluded``
        grid: Occupancy grid, required for ``grid-occluded``

    Returns:
        Per-camera label sets
    """
    return VisibilitySimulator(footprint_map, rig, occlusion, grid).simulate(pose)
