"""Shared fixtures."""

import math

import numpy as np
import pytest

from src.geometry.pose import Pose2D
from src.geometry.shapes import Polygon
from src.maps.footprint import LabeledFootprintMap, Landmark
from src.maps.occupancy import CellState, OccupancyGridMap
from src.simworld.archetypes import rasterize_polygons
from src.visibility.camera import CameraConfig, CameraRig


def make_grid(height: int, width: int, walls: bool = False) -> np.ndarray:
    cells = np.full((height, width), int(CellState.FREE), dtype=np.int8)
    if walls:
        cells[0, :] = cells[-1, :] = CellState.OCCUPIED
        cells[:, 0] = cells[:, -1] = CellState.OCCUPIED
    return cells


@pytest.fixture
def walled_grid() -> OccupancyGridMap:
    """10 m x 10 m room at 0.5 m cells with one-cell walls."""
    return OccupancyGridMap(0.5, Pose2D(0.0, 0.0, 0.0), make_grid(20, 20, walls=True))


@pytest.fixture
def forward_rig() -> CameraRig:
    """One camera looking along the robot's x axis."""
    return CameraRig(cameras=[CameraConfig(mount_offset=(0.0, 0.0, 0.0), horizontal_fov_deg=90.0)])


@pytest.fixture
def two_shelf_map() -> LabeledFootprintMap:
    return LabeledFootprintMap((
        Landmark("snack shelf", Polygon.rectangle((7.0, 5.0), 1.0, 1.0)),
        Landmark("drink shelf", Polygon.rectangle((2.0, 8.5), 1.0, 1.0)),
    ))


@pytest.fixture
def rig3() -> CameraRig:
    return CameraRig.default()


def angle_close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(math.atan2(math.sin(a - b), math.cos(a - b))) <= tol


@pytest.fixture
def shelf_room(two_shelf_map) -> OccupancyGridMap:
    """The walled room with both shelves rasterized."""
    cells = make_grid(20, 20, walls=True)
    rasterize_polygons(cells, [lm.footprint for lm in two_shelf_map.landmarks], 0.5)
    return OccupancyGridMap(0.5, Pose2D(0.0, 0.0, 0.0), cells)
