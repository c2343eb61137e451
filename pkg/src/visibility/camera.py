"""Camera rig description."""

import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from src.geometry.pose import Pose2D


class CameraConfig(BaseModel):
    """One horizontally mounted camera, as written in the rig document."""

    mount_offset: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    horizontal_fov_deg: float = Field(default=87.0, gt=0.0, le=360.0)
    max_range_m: float = Field(default=10.0, gt=0.0)
    ray_count: int = Field(default=10, ge=1)

    @property
    def horizontal_fov(self) -> float:
        return math.radians(self.horizontal_fov_deg)

    @property
    def max_range(self) -> float:
        return self.max_range_m

    @property
    def offset_pose(self) -> Pose2D:
        return Pose2D.from_sequence(self.mount_offset)

    def ray_angles(self) -> np.ndarray:
        """Ray headings relative to the optical axis, both FOV edges included."""
        if self.ray_count == 1:
            return np.zeros(1)
        half = self.horizontal_fov / 2.0
        return np.linspace(-half, half, self.ray_count)


class CameraRig(BaseModel):
    cameras: List[CameraConfig] = Field(min_length=1)

    @field_validator("cameras")
    @classmethod
    def _non_empty(cls, cameras: List[CameraConfig]) -> List[CameraConfig]:
        if not cameras:
            raise ValueError("a rig needs at least one camera")
        return cameras

    def __len__(self) -> int:
        return len(self.cameras)

    @classmethod
    def default(cls) -> "CameraRig":
        """Three cameras with optical axes 120 degrees apart, D455-like 87 degree FOV."""
        return cls(cameras=[
            CameraConfig(mount_offset=(0.0, 0.0, math.radians(yaw)))
            for yaw in (0.0, 120.0, -120.0)
        ])


def camera_world_pose(robot_pose: Pose2D, cam: CameraConfig) -> Pose2D:
    """Compose the robot pose with a camera's mount offset."""
    return robot_pose.compose(cam.offset_pose)
