"""SE(2) poses and angle arithmetic."""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from src.utils.errors import InvalidArgumentError

ArrayLike = Union[float, np.ndarray]


def wrap_angle(phi: float) -> float:
    """
    Wrap an angle into [-pi, pi).

    Uses ``atan2(sin, cos)``; the boundary value +pi is mapped to -pi so the
    half-open interval holds literally.

    Args:
        phi: Angle in radians

    Returns:
        Equivalent angle in [-pi, pi)
    """
    if not math.isfinite(phi):
        raise InvalidArgumentError(f"Cannot wrap non-finite angle: {phi}")
    wrapped = math.atan2(math.sin(phi), math.cos(phi))
    if wrapped >= math.pi:
        wrapped = -math.pi
    return wrapped


def wrap_angles(phi: np.ndarray) -> np.ndarray:
    """Vectorized :func:`wrap_angle`."""
    phi = np.asarray(phi, dtype=np.float64)
    if not np.all(np.isfinite(phi)):
        raise InvalidArgumentError("Cannot wrap non-finite angles")
    wrapped = np.arctan2(np.sin(phi), np.cos(phi))
    return np.where(wrapped >= np.pi, -np.pi, wrapped)


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.float64)


@dataclass(frozen=True)
class Pose2D:
    """An SE(2) pose; ``theta`` is always stored wrapped into [-pi, pi)."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidArgumentError(f"Pose position must be finite, got ({self.x}, {self.y})")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "Pose2D":
        if len(values) != 3:
            raise InvalidArgumentError(f"Pose needs 3 values [x, y, theta], got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta], dtype=np.float64)

    def as_list(self) -> list:
        return [self.x, self.y, self.theta]

    def compose(self, other: "Pose2D") -> "Pose2D":
        """Rigid-body composition ``self ∘ other`` (``other`` expressed in this frame)."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2D(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )

    def transform_points(self, points: np.ndarray) -> np.ndarray:
        """Map (N, 2) points from this pose's frame into the parent frame."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        return points @ rotation_matrix(self.theta).T + np.array([self.x, self.y])

    def inverse_transform_points(self, points: np.ndarray) -> np.ndarray:
        """Map (N, 2) points from the parent frame into this pose's frame."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        return (points - np.array([self.x, self.y])) @ rotation_matrix(self.theta)


def compose_pose_arrays(poses: np.ndarray, offset: Pose2D) -> np.ndarray:
    """
    Compose every row of a (K, 3) pose array with a fixed offset.

    Args:
        poses: Robot poses as rows (x, y, theta)
        offset: Pose of a child frame relative to the robot

    Returns:
        (K, 3) child-frame poses with wrapped headings
    """
    poses = np.asarray(poses, dtype=np.float64).reshape(-1, 3)
    c, s = np.cos(poses[:, 2]), np.sin(poses[:, 2])
    out = np.empty_like(poses)
    out[:, 0] = poses[:, 0] + c * offset.x - s * offset.y
    out[:, 1] = poses[:, 1] + s * offset.x + c * offset.y
    out[:, 2] = wrap_angles(poses[:, 2] + offset.theta)
    return out


def poses_to_array(poses: Sequence[Pose2D]) -> np.ndarray:
    if len(poses) == 0:
        return np.empty((0, 3), dtype=np.float64)
    return np.array([p.as_list() for p in poses], dtype=np.float64)
