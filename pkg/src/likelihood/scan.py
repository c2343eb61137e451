"""Likelihood-field scan model."""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.geometry.pose import Pose2D
from src.likelihood.params import ScanLikelihoodParams
from src.maps.distance_field import DistanceField
from src.utils.errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class ScanObservation:
    """Valid scan endpoints as (bearing, range) pairs in the sensor frame."""

    bearings: np.ndarray
    ranges: np.ndarray
    max_valid_range: float

    def __post_init__(self):
        bearings = np.array(self.bearings, dtype=np.float64).reshape(-1)
        ranges = np.array(self.ranges, dtype=np.float64).reshape(-1)
        if bearings.shape != ranges.shape:
            raise InvalidArgumentError("Scan bearings and ranges differ in length")
        if not self.max_valid_range > 0:
            raise InvalidArgumentError(f"max_valid_range must be positive, got {self.max_valid_range}")
        if np.any(~np.isfinite(ranges)) or np.any(ranges <= 0) or np.any(ranges > self.max_valid_range):
            raise InvalidArgumentError("Scan ranges must lie in (0, max_valid_range]")
        bearings.setflags(write=False)
        ranges.setflags(write=False)
        object.__setattr__(self, "bearings", bearings)
        object.__setattr__(self, "ranges", ranges)

    def __len__(self) -> int:
        return int(self.ranges.size)

    @classmethod
    def from_ranges(
        cls,
        angle_min: float,
        angle_increment: float,
        ranges: Sequence[float],
        max_valid_range: float,
    ) -> "ScanObservation":
        """Build from a laser-scan style array; non-finite or out-of-range returns are dropped."""
        ranges = np.asarray(ranges, dtype=np.float64).reshape(-1)
        bearings = angle_min + angle_increment * np.arange(ranges.size)
        with np.errstate(invalid="ignore"):
            valid = np.isfinite(ranges) & (ranges > 0) & (ranges <= max_valid_range)
        return cls(bearings[valid], ranges[valid], max_valid_range)

    def subsample(self, max_beams: int) -> "ScanObservation":
        """Keep at most ``max_beams`` endpoints with a uniform stride."""
        if len(self) <= max_beams:
            return self
        stride = math.ceil(len(self) / max_beams)
        return ScanObservation(self.bearings[::stride], self.ranges[::stride], self.max_valid_range)

    def endpoints(self) -> np.ndarray:
        """(M, 2) endpoints in the sensor frame."""
        return np.stack([self.ranges * np.cos(self.bearings), self.ranges * np.sin(self.bearings)], axis=1)


def endpoint_log_terms(distances: np.ndarray, params: ScanLikelihoodParams, max_valid_range: float) -> np.ndarray:
    """Per-endpoint log[(1 - z) exp(-d^2 / 2 sigma^2) + z / max_range]."""
    z = params.z_rand_weight
    hit = (1.0 - z) * np.exp(-np.square(distances) / (2.0 * params.sigma_hit ** 2))
    with np.errstate(divide="ignore"):
        return np.log(hit + z / max_valid_range)


def scan_log_likelihoods(
    poses: np.ndarray,
    scan: ScanObservation,
    field: DistanceField,
    params: ScanLikelihoodParams,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Scan log-likelihood for a batch of poses.

    Endpoints outside the grid contribute the random-measurement floor only.
    Poses outside the grid get ``-inf`` and are flagged.

    Args:
        poses: (K, 3) robot poses
        scan: Scan observation (already subsampled)
        field: Distance field of the occupancy grid
        params: Scan model parameters

    Returns:
        (values, pose_outside)
    """
    poses = np.asarray(poses, dtype=np.float64).reshape(-1, 3)
    count = poses.shape[0]
    if len(scan) == 0:
        raise InvalidArgumentError("Scan has no valid endpoints")

    pose_outside = ~field.grid.contains_grid_coords(field.grid.world_to_grid(poses[:, :2]))
    local = scan.endpoints()
    c, s = np.cos(poses[:, 2:3]), np.sin(poses[:, 2:3])
    wx = poses[:, 0:1] + c * local[None, :, 0] - s * local[None, :, 1]
    wy = poses[:, 1:2] + s * local[None, :, 0] + c * local[None, :, 1]
    points = np.stack([wx.reshape(-1), wy.reshape(-1)], axis=1)

    distances, inside = field.interpolate(points)
    terms = endpoint_log_terms(distances, params, scan.max_valid_range)
    with np.errstate(divide="ignore"):
        floor = math.log(params.z_rand_weight / scan.max_valid_range) if params.z_rand_weight > 0 else -np.inf
    terms = np.where(inside, terms, floor).reshape(count, len(scan))

    values = terms.sum(axis=1)
    values[pose_outside] = -np.inf
    return values, pose_outside


def scan_log_likelihood(
    pose: Pose2D,
    scan: ScanObservation,
    field: DistanceField,
    params: ScanLikelihoodParams = ScanLikelihoodParams(),
) -> float:
    """Scalar form of :func:`scan_log_likelihoods`; ``-inf`` outside the grid."""
    values, _ = scan_log_likelihoods(pose.as_array()[None, :], scan, field, params)
    return float(values[0])
