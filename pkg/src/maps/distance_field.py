"""Euclidean distance field over an occupancy grid."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage

from src.maps.occupancy import OccupancyGridMap
from src.utils.logger import logger


@dataclass(frozen=True, eq=False)
class DistanceField:
    """
    Per-cell distance (meters) to the nearest occupied cell center.

    ``no_obstacles`` is set when the source grid had no occupied cell; every
    distance then equals the sentinel ``10 x map diagonal``.
    """

    grid: OccupancyGridMap
    distances: np.ndarray
    no_obstacles: bool = False

    @property
    def resolution(self) -> float:
        return self.grid.resolution

    def cell_distance(self, row: int, col: int) -> float:
        return float(self.distances[row, col])

    def interpolate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Bilinear distance lookup between the four surrounding cell centers.

        Args:
            points: (N, 2) world-frame points

        Returns:
            (distances, inside) where ``inside`` flags points within the grid
        """
        g = self.grid.world_to_grid(points)
        inside = self.grid.contains_grid_coords(g)
        # map_coordinates indexes (row, col) at cell centers
        coords = np.stack([g[:, 1] - 0.5, g[:, 0] - 0.5])
        values = ndimage.map_coordinates(self.distances, coords, order=1, mode="nearest")
        return values, inside


def build_distance_field(grid: OccupancyGridMap) -> DistanceField:
    """
    Exact Euclidean distance transform of the occupied cells.

    Unknown cells count as non-obstacles.

    Args:
        grid: Occupancy grid

    Returns:
        Distance field sharing the grid geometry
    """
    occupied = grid.occupied_mask
    if not np.any(occupied):
        sentinel = 10.0 * grid.diagonal
        logger.warning(f"Grid has no occupied cells; distance field set to sentinel {sentinel:.2f} m")
        distances = np.full(occupied.shape, sentinel, dtype=np.float64)
        distances.setflags(write=False)
        return DistanceField(grid=grid, distances=distances, no_obstacles=True)

    # distance_transform_edt measures distance to the nearest zero element
    distances = ndimage.distance_transform_edt(~occupied) * grid.resolution
    distances = np.asarray(distances, dtype=np.float64)
    distances.setflags(write=False)
    logger.debug(f"Built distance field {grid.width}x{grid.height}, max {distances.max():.3f} m")
    return DistanceField(grid=grid, distances=distances)
