"""Synthetic 2D LiDAR over an occupancy grid."""

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, Field

from src.geometry.pose import Pose2D
from src.geometry.raycast import cast_rays_occupancy
from src.likelihood.scan import ScanObservation
from src.maps.occupancy import OccupancyGridMap
from src.utils.errors import InvalidPoseError


class ScanSimConfig(BaseModel):
    beam_count: int = Field(default=360, ge=1)
    fov_deg: float = Field(default=360.0, gt=0.0, le=360.0)
    max_range: float = Field(default=12.0, gt=0.0)
    range_noise_sigma: float = Field(default=0.01, ge=0.0)

    @property
    def fov(self) -> float:
        return math.radians(self.fov_deg)


def beam_layout(beam_count: int, fov: float) -> Tuple[float, float]:
    """
    (angle_min, angle_increment) for evenly spaced beams.

    A full circle does not repeat its first bearing; a partial fan includes
    both edges.
    """
    if beam_count == 1:
        return 0.0, 0.0
    if fov >= 2.0 * math.pi - 1e-12:
        return -math.pi, 2.0 * math.pi / beam_count
    return -fov / 2.0, fov / (beam_count - 1)


def simulate_scan_ranges(
    pose: Pose2D,
    grid: OccupancyGridMap,
    scan_cfg: ScanSimConfig,
    seed: int,
) -> Tuple[float, float, np.ndarray]:
    """
    Raw scan as (angle_min, angle_increment, ranges); beams without a return are NaN.

    Raises:
        InvalidPoseError: the pose is not in a free cell
    """
    if not grid.is_free(np.array([[pose.x, pose.y]]))[0]:
        raise InvalidPoseError(
            f"Scan pose ({pose.x:.3f}, {pose.y:.3f}) is not in free space",
            details={"pose": pose.as_list()},
        )
    angle_min, increment = beam_layout(scan_cfg.beam_count, scan_cfg.fov)
    bearings = angle_min + increment * np.arange(scan_cfg.beam_count)
    headings = pose.theta + bearings
    directions = np.stack([np.cos(headings), np.sin(headings)], axis=1)
    origins = np.repeat([[pose.x, pose.y]], scan_cfg.beam_count, axis=0)

    ranges = cast_rays_occupancy(origins, directions, scan_cfg.max_range, grid)
    hit = ranges < scan_cfg.max_range
    if scan_cfg.range_noise_sigma > 0:
        rng = np.random.default_rng(seed)
        ranges = ranges + rng.normal(0.0, scan_cfg.range_noise_sigma, size=ranges.shape)
    ranges = np.clip(ranges, 1e-3 * grid.resolution, scan_cfg.max_range)
    ranges = np.where(hit, ranges, np.nan)
    return angle_min, increment, ranges


def simulate_scan(
    pose: Pose2D,
    grid: OccupancyGridMap,
    beam_count: int = 360,
    fov: float = 2.0 * math.pi,
    max_range: float = 12.0,
    range_noise_sigma: float = 0.01,
    seed: int = 0,
) -> ScanObservation:
    """
    Scan a grid from ``pose`` with Gaussian range noise.

    Args:
        pose: Sensor pose (must be in a free cell)
        grid: Occupancy grid
        beam_count: Number of beams
        fov: Field of view in radians
        max_range: Maximum range in meters
        range_noise_sigma: Range noise standard deviation
        seed: Noise seed

    Returns:
        Scan holding only beams that hit something
    """
    scan_cfg = ScanSimConfig(
        beam_count=beam_count,
        fov_deg=math.degrees(fov),
        max_range=max_range,
        range_noise_sigma=range_noise_sigma,
    )
    angle_min, increment, ranges = simulate_scan_ranges(pose, grid, scan_cfg, seed)
    return ScanObservation.from_ranges(angle_min, increment, ranges, max_range)
