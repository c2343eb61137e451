"""Rays, polygons and grid indices."""

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from matplotlib.path import Path

from src.utils.errors import GeometryError

Point = Tuple[float, float]


class GridIndex(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class Ray:
    """A half-line ``origin + t * direction`` for t in [0, max_range]."""

    origin: Point
    direction: Point
    max_range: float

    def __post_init__(self):
        norm = math.hypot(self.direction[0], self.direction[1])
        if abs(norm - 1.0) > 1e-9:
            raise GeometryError(f"Ray direction must be a unit vector, got norm {norm}")
        if not self.max_range > 0:
            raise GeometryError(f"Ray max_range must be positive, got {self.max_range}")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "direction", (float(self.direction[0]), float(self.direction[1])))

    @classmethod
    def from_angle(cls, origin: Point, angle: float, max_range: float) -> "Ray":
        return cls(origin, (math.cos(angle), math.sin(angle)), max_range)


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Proper or touching intersection test between two closed segments."""

    def orient(a, b, c):
        value = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(value) < 1e-12:
            return 0
        return 1 if value > 0 else -1

    def on_segment(a, b, c):
        return min(a[0], b[0]) - 1e-12 <= c[0] <= max(a[0], b[0]) + 1e-12 and \
            min(a[1], b[1]) - 1e-12 <= c[1] <= max(a[1], b[1]) + 1e-12

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and on_segment(p1, p2, q1):
        return True
    if o2 == 0 and on_segment(p1, p2, q2):
        return True
    if o3 == 0 and on_segment(q1, q2, p1):
        return True
    if o4 == 0 and on_segment(q1, q2, p2):
        return True
    return False


@dataclass(frozen=True)
class Polygon:
    """A simple polygon with implicit closing edge."""

    vertices: Tuple[Point, ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise GeometryError(f"Polygon needs at least 3 vertices, got {len(verts)}")
        if not all(math.isfinite(c) for v in verts for c in v):
            raise GeometryError("Polygon vertices must be finite")
        object.__setattr__(self, "vertices", verts)
        if abs(self.signed_area()) < 1e-12:
            raise GeometryError("Polygon has zero area")
        if not self._is_simple():
            raise GeometryError("Polygon is self-intersecting")

    def _is_simple(self) -> bool:
        n = len(self.vertices)
        edges = [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                # adjacent edges share a vertex by construction
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(*edges[i], *edges[j]):
                    return False
        return True

    def signed_area(self) -> float:
        v = np.asarray(self.vertices)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def area(self) -> float:
        return abs(self.signed_area())

    def centroid(self) -> np.ndarray:
        v = np.asarray(self.vertices)
        x, y = v[:, 0], v[:, 1]
        cross = x * np.roll(y, -1) - np.roll(x, -1) * y
        a = cross.sum() / 2.0
        cx = ((x + np.roll(x, -1)) * cross).sum() / (6.0 * a)
        cy = ((y + np.roll(y, -1)) * cross).sum() / (6.0 * a)
        return np.array([cx, cy])

    def bounds(self) -> Tuple[float, float, float, float]:
        v = np.asarray(self.vertices)
        return float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())

    def edges(self) -> Tuple[np.ndarray, np.ndarray]:
        """Edge start and end points, each (n, 2)."""
        starts = np.asarray(self.vertices, dtype=np.float64)
        return starts, np.roll(starts, -1, axis=0)

    def path(self) -> Path:
        return Path(np.asarray(self.vertices), closed=False)

    def contains_points(self, points: np.ndarray) -> np.ndarray:
        """Interior test for (N, 2) points; boundary points may go either way."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        return self.path().contains_points(points)

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(tuple((x + dx, y + dy) for x, y in self.vertices))

    def rotated(self, angle: float, about: Point = (0.0, 0.0)) -> "Polygon":
        c, s = math.cos(angle), math.sin(angle)
        ox, oy = about
        return Polygon(tuple(
            (ox + c * (x - ox) - s * (y - oy), oy + s * (x - ox) + c * (y - oy))
            for x, y in self.vertices
        ))

    @classmethod
    def rectangle(cls, center: Point, width: float, height: float, angle: float = 0.0) -> "Polygon":
        hw, hh = width / 2.0, height / 2.0
        corners = ((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh))
        c, s = math.cos(angle), math.sin(angle)
        return cls(tuple(
            (center[0] + c * x - s * y, center[1] + s * x + c * y) for x, y in corners
        ))

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]]) -> "Polygon":
        return cls(tuple((float(p[0]), float(p[1])) for p in points))
