"""Synthetic environment archetypes with ground-truth maps."""

import math
import string
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.geometry.pose import Pose2D
from src.geometry.shapes import Polygon
from src.maps.footprint import LabeledFootprintMap, Landmark
from src.maps.occupancy import CellState, OccupancyGridMap
from src.utils.errors import WorldGenerationError
from src.utils.logger import logger

UNIFORM_VOCABULARY = ("shelf", "table", "cabinet")
WALL_CELLS = 2
_MAX_PLACEMENT_ATTEMPTS = 500


class ArchetypeKind(str, Enum):
    """Uniform/Diverse Geometry crossed with Uniform/Diverse Appearance."""

    UG_UA = "UG/UA"
    UG_DA = "UG/DA"
    DG_UA = "DG/UA"
    DG_DA = "DG/DA"

    @property
    def uniform_geometry(self) -> bool:
        return self in (ArchetypeKind.UG_UA, ArchetypeKind.UG_DA)

    @property
    def uniform_appearance(self) -> bool:
        return self in (ArchetypeKind.UG_UA, ArchetypeKind.DG_UA)


_DEFAULT_COUNTS = {
    ArchetypeKind.UG_UA: 16,
    ArchetypeKind.UG_DA: 12,
    ArchetypeKind.DG_UA: 20,
    ArchetypeKind.DG_DA: 20,
}


class ArchetypeSpec(BaseModel):
    kind: ArchetypeKind
    world_size: Tuple[float, float] = (20.0, 20.0)
    resolution: float = Field(default=0.05, gt=0.0)
    object_count: Optional[int] = Field(default=None, ge=1)
    label_vocabulary_size: Optional[int] = Field(default=None, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _fill_defaults(self) -> "ArchetypeSpec":
        if self.world_size[0] <= 0 or self.world_size[1] <= 0:
            raise ValueError("world_size must be positive")
        if self.object_count is None:
            self.object_count = _DEFAULT_COUNTS[self.kind]
        if self.kind.uniform_appearance:
            default = 1 if self.kind.uniform_geometry else len(UNIFORM_VOCABULARY)
            size = self.label_vocabulary_size or default
            if size > len(UNIFORM_VOCABULARY):
                raise ValueError(f"uniform-appearance worlds use at most {len(UNIFORM_VOCABULARY)} labels")
            self.label_vocabulary_size = size
        else:
            self.label_vocabulary_size = self.object_count
        return self


class World(NamedTuple):
    footprint_map: LabeledFootprintMap
    grid: OccupancyGridMap
    spec: ArchetypeSpec


def unique_label(index: int) -> str:
    """A, B, ... Z, A1, B1, ..."""
    letter = string.ascii_uppercase[index % 26]
    cycle = index // 26
    return letter if cycle == 0 else f"{letter}{cycle}"


def _labels(spec: ArchetypeSpec, rng: np.random.Generator) -> List[str]:
    if not spec.kind.uniform_appearance:
        return [unique_label(i) for i in range(spec.object_count)]
    if spec.label_vocabulary_size == 1 and spec.kind.uniform_geometry:
        return ["column"] * spec.object_count
    vocabulary = UNIFORM_VOCABULARY[: spec.label_vocabulary_size]
    return [vocabulary[int(i)] for i in rng.integers(len(vocabulary), size=spec.object_count)]


def lattice_centers(count: int, world_size: Tuple[float, float]) -> np.ndarray:
    """Centers of a near-square lattice spread evenly over the world."""
    cols = math.ceil(math.sqrt(count))
    rows = math.ceil(count / cols)
    sx, sy = world_size[0] / (cols + 1), world_size[1] / (rows + 1)
    centers = [((c + 1) * sx, (r + 1) * sy) for r in range(rows) for c in range(cols)]
    return np.array(centers[:count])


def _lattice_polygons(spec: ArchetypeSpec) -> List[Polygon]:
    centers = lattice_centers(spec.object_count, spec.world_size)
    if spec.kind is ArchetypeKind.UG_UA:
        width, height = 1.0, 1.0
    else:
        width, height = 1.6, 0.6
    cols = math.ceil(math.sqrt(spec.object_count))
    spacing = min(spec.world_size[0] / (cols + 1), spec.world_size[1] / (math.ceil(spec.object_count / cols) + 1))
    if spacing <= max(width, height) + 2 * WALL_CELLS * spec.resolution:
        raise WorldGenerationError(
            f"{spec.object_count} objects do not fit a lattice in {spec.world_size}",
            details={"kind": spec.kind.value, "object_count": spec.object_count},
        )
    return [Polygon.rectangle(tuple(center), width, height) for center in centers]


def _scattered_polygons(spec: ArchetypeSpec, rng: np.random.Generator) -> List[Polygon]:
    """Rejection-sampled rectangles of varied size and orientation."""
    clearance = 0.8
    margin = WALL_CELLS * spec.resolution + clearance
    placed: List[Tuple[np.ndarray, float, Polygon]] = []
    attempts = 0
    while len(placed) < spec.object_count:
        attempts += 1
        if attempts > _MAX_PLACEMENT_ATTEMPTS * spec.object_count:
            raise WorldGenerationError(
                f"Placed only {len(placed)} of {spec.object_count} objects after {attempts - 1} attempts",
                details={"kind": spec.kind.value, "seed": spec.seed, "placed": len(placed)},
            )
        width, height = rng.uniform(0.4, 2.4), rng.uniform(0.4, 1.2)
        angle = rng.uniform(0.0, math.pi)
        radius = 0.5 * math.hypot(width, height)
        lo = margin + radius
        hi_x, hi_y = spec.world_size[0] - lo, spec.world_size[1] - lo
        if hi_x <= lo or hi_y <= lo:
            continue
        center = np.array([rng.uniform(lo, hi_x), rng.uniform(lo, hi_y)])
        if any(np.linalg.norm(center - c) < radius + r + clearance for c, r, _ in placed):
            continue
        placed.append((center, radius, Polygon.rectangle(tuple(center), width, height, angle)))
    return [poly for _, _, poly in placed]


def rasterize_polygons(cells: np.ndarray, polygons: List[Polygon], resolution: float) -> None:
    """
    Mark polygon cells occupied in place (grid origin at (0, 0), no rotation).

    A cell is occupied when its center lies inside a polygon or when a dense
    sample of the polygon boundary passes through it.
    """
    height, width = cells.shape
    for poly in polygons:
        x0, y0, x1, y1 = poly.bounds()
        c0, c1 = max(0, int(math.floor(x0 / resolution))), min(width - 1, int(math.floor(x1 / resolution)))
        r0, r1 = max(0, int(math.floor(y0 / resolution))), min(height - 1, int(math.floor(y1 / resolution)))
        if c0 > c1 or r0 > r1:
            continue
        rows, cols = np.mgrid[r0:r1 + 1, c0:c1 + 1]
        centers = np.stack([(cols.ravel() + 0.5) * resolution, (rows.ravel() + 0.5) * resolution], axis=1)
        inside = poly.contains_points(centers)
        cells[rows.ravel()[inside], cols.ravel()[inside]] = CellState.OCCUPIED

        starts, ends = poly.edges()
        for a, b in zip(starts, ends):
            n = max(2, int(math.ceil(np.linalg.norm(b - a) / (resolution / 4.0))) + 1)
            pts = a[None, :] + np.linspace(0.0, 1.0, n)[:, None] * (b - a)[None, :]
            pc = np.clip(np.floor(pts[:, 0] / resolution).astype(np.intp), 0, width - 1)
            pr = np.clip(np.floor(pts[:, 1] / resolution).astype(np.intp), 0, height - 1)
            cells[pr, pc] = CellState.OCCUPIED


def generate_world(spec: ArchetypeSpec) -> World:
    """
    Build a labeled footprint map and its matching occupancy grid.

    Args:
        spec: Archetype parameters

    Returns:
        World whose grid marks every footprint and the boundary walls occupied
    """
    rng = np.random.default_rng(spec.seed)
    if spec.kind.uniform_geometry:
        polygons = _lattice_polygons(spec)
    else:
        polygons = _scattered_polygons(spec, rng)
    labels = _labels(spec, rng)
    footprint_map = LabeledFootprintMap(tuple(Landmark(label, poly) for label, poly in zip(labels, polygons)))

    width = int(round(spec.world_size[0] / spec.resolution))
    height = int(round(spec.world_size[1] / spec.resolution))
    cells = np.full((height, width), int(CellState.FREE), dtype=np.int8)
    cells[:WALL_CELLS, :] = CellState.OCCUPIED
    cells[-WALL_CELLS:, :] = CellState.OCCUPIED
    cells[:, :WALL_CELLS] = CellState.OCCUPIED
    cells[:, -WALL_CELLS:] = CellState.OCCUPIED
    rasterize_polygons(cells, polygons, spec.resolution)

    grid = OccupancyGridMap(spec.resolution, Pose2D(0.0, 0.0, 0.0), cells)
    logger.info(
        f"Generated {spec.kind.value} world (seed {spec.seed}): {len(footprint_map)} landmarks, "
        f"{len(footprint_map.label_set)} labels, {width}x{height} cells"
    )
    return World(footprint_map, grid, spec)
