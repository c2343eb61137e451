"""Occupancy grid maps in the robot map-server format."""

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import yaml
from PIL import Image
from pydantic import BaseModel, Field, ValidationError, field_validator

from src.geometry.pose import Pose2D, rotation_matrix
from src.geometry.shapes import GridIndex
from src.utils.errors import InvalidArgumentError, MapParseError
from src.utils.logger import logger

DEFAULT_FREE_PIXEL = 250
DEFAULT_OCCUPIED_PIXEL = 50


class CellState(IntEnum):
    """Per-cell state, numbered like ROS ``nav_msgs/OccupancyGrid`` values."""

    UNKNOWN = -1
    FREE = 0
    OCCUPIED = 100


class MapMetadata(BaseModel):
    """Map-server metadata document (the YAML next to the PGM)."""

    image: Optional[str] = None
    resolution: float = Field(gt=0)
    origin: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    negate: int = 0
    free_thresh: float = Field(default=1.0 - DEFAULT_FREE_PIXEL / 255.0, ge=0.0, le=1.0)
    occupied_thresh: float = Field(default=1.0 - DEFAULT_OCCUPIED_PIXEL / 255.0, ge=0.0, le=1.0)
    mode: Optional[str] = None

    @field_validator("negate")
    @classmethod
    def _negate_flag(cls, value: int) -> int:
        if value not in (0, 1):
            raise ValueError("negate must be 0 or 1")
        return value

    def pixel_thresholds(self) -> Tuple[int, int]:
        """(free, occupied) thresholds on the (possibly negated) pixel value."""
        return (
            int(round((1.0 - self.free_thresh) * 255.0)),
            int(round((1.0 - self.occupied_thresh) * 255.0)),
        )


@dataclass(frozen=True, eq=False)
class OccupancyGridMap:
    """
    Rasterized free/occupied/unknown map.

    ``cells[row, col]`` holds a :class:`CellState`; row 0 is the lowest-y row
    and ``origin`` is the world pose of cell (0, 0)'s outer corner.
    """

    resolution: float
    origin: Pose2D
    cells: np.ndarray

    def __post_init__(self):
        if not self.resolution > 0:
            raise InvalidArgumentError(f"Grid resolution must be positive, got {self.resolution}")
        cells = np.array(self.cells, dtype=np.int8)
        if cells.ndim != 2 or cells.size == 0:
            raise InvalidArgumentError(f"Grid cells must be a non-empty 2D array, got shape {cells.shape}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def height(self) -> int:
        return int(self.cells.shape[0])

    @property
    def width(self) -> int:
        return int(self.cells.shape[1])

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height) * self.resolution

    @cached_property
    def occupied_mask(self) -> np.ndarray:
        return self.cells == CellState.OCCUPIED

    @cached_property
    def free_mask(self) -> np.ndarray:
        return self.cells == CellState.FREE

    @cached_property
    def _rotation(self) -> np.ndarray:
        return rotation_matrix(self.origin.theta)

    def world_to_grid(self, points: np.ndarray) -> np.ndarray:
        """Continuous (col, row) coordinates in cell units for (N, 2) world points."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        local = (points - np.array([self.origin.x, self.origin.y])) @ self._rotation
        return local / self.resolution

    def grid_to_world(self, grid_coords: np.ndarray) -> np.ndarray:
        grid_coords = np.asarray(grid_coords, dtype=np.float64).reshape(-1, 2)
        return grid_coords * self.resolution @ self._rotation.T + np.array([self.origin.x, self.origin.y])

    def world_directions_to_grid(self, directions: np.ndarray) -> np.ndarray:
        """Rotate world-frame vectors into the grid frame (no scaling)."""
        return np.asarray(directions, dtype=np.float64).reshape(-1, 2) @ self._rotation

    def contains_grid_coords(self, grid_coords: np.ndarray) -> np.ndarray:
        gx, gy = grid_coords[:, 0], grid_coords[:, 1]
        return (gx >= 0.0) & (gx < self.width) & (gy >= 0.0) & (gy < self.height)

    def world_to_cell(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Cell indices of world points.

        Returns:
            rows, cols and an in-bounds mask (indices are clipped where outside)
        """
        g = self.world_to_grid(points)
        inside = self.contains_grid_coords(g)
        cols = np.clip(np.floor(g[:, 0]).astype(np.intp), 0, self.width - 1)
        rows = np.clip(np.floor(g[:, 1]).astype(np.intp), 0, self.height - 1)
        return rows, cols, inside

    def cell_centers(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        coords = np.stack([np.asarray(cols) + 0.5, np.asarray(rows) + 0.5], axis=-1)
        return self.grid_to_world(coords)

    def state_at(self, points: np.ndarray) -> np.ndarray:
        """Cell state for world points; outside the grid reads as unknown."""
        rows, cols, inside = self.world_to_cell(points)
        states = self.cells[rows, cols].astype(np.int16)
        return np.where(inside, states, int(CellState.UNKNOWN))

    def is_free(self, points: np.ndarray) -> np.ndarray:
        return self.state_at(points) == CellState.FREE

    def free_cell_array(self) -> np.ndarray:
        """(M, 2) array of free (row, col) indices in row-major order."""
        return np.argwhere(self.free_mask)

    def free_cells(self) -> List[GridIndex]:
        return [GridIndex(int(r), int(c)) for r, c in self.free_cell_array()]


def free_cells(grid: OccupancyGridMap) -> List[GridIndex]:
    """Free cells of a grid in row-major order; unknown cells are never returned."""
    return grid.free_cells()


def _read_pgm(pgm_path: Path) -> np.ndarray:
    with open(pgm_path, "rb") as f:
        magic = f.read(2)
    if magic != b"P5":
        raise MapParseError(f"{pgm_path} is not a binary P5 PGM (magic {magic!r})")

    try:
        image = Image.open(pgm_path)
    except (OSError, ValueError) as e:
        raise MapParseError(f"Cannot read PGM header of {pgm_path}: {e}") from e

    with image:
        if image.mode != "L":
            raise MapParseError(f"{pgm_path}: expected 8-bit grayscale PGM, got mode {image.mode}")
        width, height = image.size
        offset = image.tile[0][2] if image.tile else None
        if offset is not None:
            expected = offset + width * height
            actual = pgm_path.stat().st_size
            if actual != expected:
                raise MapParseError(
                    f"{pgm_path}: header declares {width}x{height} pixels but payload holds "
                    f"{actual - offset} bytes",
                    details={"width": width, "height": height, "payload_bytes": actual - offset},
                )
        try:
            image.load()
        except OSError as e:
            raise MapParseError(f"{pgm_path}: truncated payload: {e}") from e
        return np.asarray(image, dtype=np.uint8).copy()


def load_occupancy_map(
    pgm_path: Union[str, Path],
    meta_path: Union[str, Path],
) -> OccupancyGridMap:
    """
    Load an occupancy grid from a P5 PGM and its metadata document.

    Args:
        pgm_path: Path to the binary PGM image
        meta_path: Path to the YAML metadata

    Returns:
        Occupancy grid map
    """
    pgm_path, meta_path = Path(pgm_path), Path(meta_path)
    try:
        raw = yaml.safe_load(meta_path.read_text(encoding="utf-8"))
        meta = MapMetadata.model_validate(raw)
    except (yaml.YAMLError, ValidationError) as e:
        raise MapParseError(f"Invalid map metadata {meta_path}: {e}") from e

    pixels = _read_pgm(pgm_path)
    if meta.negate:
        pixels = 255 - pixels
    free_px, occupied_px = meta.pixel_thresholds()

    cells = np.full(pixels.shape, int(CellState.UNKNOWN), dtype=np.int8)
    cells[pixels >= free_px] = CellState.FREE
    cells[pixels <= occupied_px] = CellState.OCCUPIED
    # image row 0 is the top (max y)
    cells = np.flipud(cells)

    grid = OccupancyGridMap(meta.resolution, Pose2D.from_sequence(meta.origin), cells)
    logger.info(
        f"Loaded occupancy map {pgm_path.name}: {grid.width}x{grid.height} @ {grid.resolution} m/cell, "
        f"{int(grid.free_mask.sum())} free / {int(grid.occupied_mask.sum())} occupied"
    )
    return grid


def save_occupancy_map(
    grid: OccupancyGridMap,
    pgm_path: Union[str, Path],
    meta_path: Union[str, Path],
) -> None:
    """Write a grid as P5 PGM plus map-server metadata (free 254, occupied 0, unknown 205)."""
    pgm_path, meta_path = Path(pgm_path), Path(meta_path)
    pixels = np.full(grid.cells.shape, 205, dtype=np.uint8)
    pixels[grid.free_mask] = 254
    pixels[grid.occupied_mask] = 0
    Image.fromarray(np.ascontiguousarray(np.flipud(pixels))).save(pgm_path, format="PPM")

    meta = MapMetadata(
        image=pgm_path.name,
        resolution=grid.resolution,
        origin=(grid.origin.x, grid.origin.y, grid.origin.theta),
        negate=0,
    )
    meta_path.write_text(
        yaml.safe_dump(meta.model_dump(mode="json", exclude_none=True), sort_keys=False), encoding="utf-8"
    )
    logger.info(f"Saved occupancy map to {pgm_path} / {meta_path}")
