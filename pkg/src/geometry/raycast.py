"""Ray casting against polygons and occupancy grids."""

import math
from typing import TYPE_CHECKING, Optional, Union

import numpy as np

from src.geometry.shapes import Polygon, Ray
from src.utils.errors import OutOfBoundsError

if TYPE_CHECKING:
    from src.maps.occupancy import OccupancyGridMap

_PARALLEL_EPS = 1e-12
_EDGE_EPS = 1e-12


def ray_segment_distances(
    origins: np.ndarray,
    directions: np.ndarray,
    seg_starts: np.ndarray,
    seg_ends: np.ndarray,
) -> np.ndarray:
    """
    Distance along every ray to every segment.

    Args:
        origins: (R, 2) ray origins
        directions: (R, 2) unit ray directions
        seg_starts: (E, 2) segment start points
        seg_ends: (E, 2) segment end points

    Returns:
        (R, E) array of hit distances t >= 0, ``inf`` where the ray misses
    """
    ox, oy = origins[:, 0:1], origins[:, 1:2]
    dx, dy = directions[:, 0:1], directions[:, 1:2]
    ax, ay = seg_starts[None, :, 0], seg_starts[None, :, 1]
    ex = seg_ends[None, :, 0] - ax
    ey = seg_ends[None, :, 1] - ay

    wx = ax - ox
    wy = ay - oy
    denom = dx * ey - dy * ex
    w_cross_e = wx * ey - wy * ex
    w_cross_d = wx * dy - wy * dx

    parallel = np.abs(denom) <= _PARALLEL_EPS
    safe = np.where(parallel, 1.0, denom)
    t = w_cross_e / safe
    u = w_cross_d / safe
    hit = ~parallel & (t >= 0.0) & (u >= -_EDGE_EPS) & (u <= 1.0 + _EDGE_EPS)
    result = np.where(hit, t, np.inf)

    # Collinear overlap: the ray runs along the segment
    collinear = parallel & (np.abs(w_cross_d) <= 1e-9 * (np.hypot(ex, ey) + 1.0))
    if np.any(collinear):
        ta = wx * dx + wy * dy
        tb = (wx + ex) * dx + (wy + ey) * dy
        lo, hi = np.minimum(ta, tb), np.maximum(ta, tb)
        along = np.where(lo <= 0.0, np.where(hi >= 0.0, 0.0, np.inf), lo)
        result = np.where(collinear, along, result)
    return result


def ray_polygon_hit(ray: Ray, poly: Polygon) -> Optional[float]:
    """
    Smallest distance at which a ray meets a polygon.

    Args:
        ray: Ray to cast
        poly: Closed polygon boundary

    Returns:
        Hit distance in [0, max_range]; 0 when the origin is inside;
        None when the ray misses within range
    """
    origin = np.array([ray.origin], dtype=np.float64)
    if poly.contains_points(origin)[0]:
        return 0.0
    starts, ends = poly.edges()
    t = ray_segment_distances(origin, np.array([ray.direction]), starts, ends)
    best = float(t.min())
    if best <= ray.max_range:
        return best
    return None


def cast_rays_occupancy(
    origins: np.ndarray,
    directions: np.ndarray,
    max_range: Union[float, np.ndarray],
    grid: "OccupancyGridMap",
) -> np.ndarray:
    """
    March rays through an occupancy grid at half-cell steps.

    Args:
        origins: (R, 2) world-frame origins, all inside the grid
        directions: (R, 2) unit directions in the world frame
        max_range: scalar or (R,) maximum distances
        grid: Occupancy grid; unknown cells do not block

    Returns:
        (R,) distance to the center of the first occupied cell crossed,
        0 when the origin cell is occupied, ``max_range`` when nothing is hit
    """
    origins = np.asarray(origins, dtype=np.float64).reshape(-1, 2)
    directions = np.asarray(directions, dtype=np.float64).reshape(-1, 2)
    count = origins.shape[0]
    limits = np.broadcast_to(np.asarray(max_range, dtype=np.float64), (count,)).copy()
    result = limits.copy()
    if count == 0:
        return result

    start = grid.world_to_grid(origins)
    inside = grid.contains_grid_coords(start)
    if not np.all(inside):
        bad = int(np.argmin(inside))
        raise OutOfBoundsError(
            f"Ray origin {origins[bad].tolist()} lies outside the grid",
            details={"origin": origins[bad].tolist()},
        )
    # directions in grid units per meter
    grid_dirs = grid.world_directions_to_grid(directions) / grid.resolution
    occupied = grid.occupied_mask

    rows0 = np.floor(start[:, 1]).astype(np.intp)
    cols0 = np.floor(start[:, 0]).astype(np.intp)
    at_origin = occupied[rows0, cols0]
    result[at_origin] = 0.0

    step = grid.resolution / 2.0
    n_steps = int(math.ceil(float(limits.max()) / step))
    active = np.flatnonzero(~at_origin)
    for k in range(1, n_steps + 1):
        if active.size == 0:
            break
        t = k * step
        active = active[limits[active] >= t]
        if active.size == 0:
            break
        pts = start[active] + t * grid_dirs[active]
        in_grid = grid.contains_grid_coords(pts)
        active, pts = active[in_grid], pts[in_grid]
        cols = np.floor(pts[:, 0]).astype(np.intp)
        rows = np.floor(pts[:, 1]).astype(np.intp)
        hit = occupied[rows, cols]
        if np.any(hit):
            idx = active[hit]
            centers = np.stack([cols[hit] + 0.5, rows[hit] + 0.5], axis=1)
            dist = np.hypot(centers[:, 0] - start[idx, 0], centers[:, 1] - start[idx, 1]) * grid.resolution
            result[idx] = np.minimum(dist, limits[idx])
            active = active[~hit]
    return result


def cast_ray_occupancy(ray: Ray, grid: "OccupancyGridMap") -> float:
    """Scalar form of :func:`cast_rays_occupancy`."""
    distances = cast_rays_occupancy(
        np.array([ray.origin]), np.array([ray.direction]), ray.max_range, grid
    )
    return float(distances[0])
