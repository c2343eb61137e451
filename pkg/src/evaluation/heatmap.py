"""Likelihood heatmaps over the occupancy grid."""

from pathlib import Path
from typing import Optional, Union

import numpy as np
from matplotlib.figure import Figure
from PIL import Image

from src.geometry.pose import Pose2D
from src.maps.occupancy import OccupancyGridMap
from src.mcl.hypotheses import HypothesisSet, Modality
from src.utils.errors import InvalidArgumentError
from src.utils.logger import logger


# grey level of pose marks in a .pgm heatmap
PGM_MARK = 128

# pixel offsets: estimate is an "x", ground truth a "+"
ESTIMATE_MARK = ((0, 0), (-1, -1), (1, 1), (-1, 1), (1, -1))
GROUND_TRUTH_MARK = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))


def _mark_pose(pixels: np.ndarray, grid: OccupancyGridMap, pose: Pose2D, offsets) -> None:
    """Stamp a pose mark onto a top-down (flipped) raster; pixels off the raster are dropped."""
    col, row = np.floor(grid.world_to_grid(np.array([[pose.x, pose.y]]))[0]).astype(int)
    height, width = pixels.shape
    for d_row, d_col in offsets:
        r, c = height - 1 - row + d_row, col + d_col
        if 0 <= r < height and 0 <= c < width:
            pixels[r, c] = PGM_MARK


def heatmap_raster(hyps: HypothesisSet, modality: Modality, grid: OccupancyGridMap) -> np.ndarray:
    """
    Per-cell maximum likelihood relative to the global maximum.

    Returns:
        (height, width) array in [0, 1]; cells without hypotheses are 0
    """
    ll = hyps.log_likelihoods(modality)
    rows, cols, inside = grid.world_to_cell(hyps.poses[:, :2])
    raster = np.full((grid.height, grid.width), -np.inf)
    np.maximum.at(raster, (rows[inside], cols[inside]), ll[inside])

    finite = np.isfinite(raster)
    if not np.any(finite):
        return np.zeros_like(raster)
    peak = raster[finite].max()
    out = np.zeros_like(raster)
    out[finite] = np.exp(raster[finite] - peak)
    return out


def export_heatmap(
    hyps: HypothesisSet,
    modality: Modality,
    grid: OccupancyGridMap,
    path: Union[str, Path],
    estimate: Optional[Pose2D] = None,
    ground_truth: Optional[Pose2D] = None,
) -> Path:
    """
    Write a heatmap image.

    ``.pgm`` writes the raster (255 = most likely cell) with the estimate
    stamped as a grey "x" and the ground truth as a grey "+"; ``.png`` and
    ``.svg`` render a color-mapped figure with the same poses marked.

    Args:
        hyps: Evaluated hypotheses
        modality: Which log-likelihood to draw
        grid: Occupancy grid defining the raster
        path: Output file
        estimate: Estimated pose to mark
        ground_truth: Ground-truth pose to mark

    Returns:
        Path written
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in (".pgm", ".png", ".svg"):
        raise InvalidArgumentError(f"Unsupported heatmap format {suffix!r}; use .pgm, .png or .svg")
    path.parent.mkdir(parents=True, exist_ok=True)
    raster = heatmap_raster(hyps, modality, grid)

    if suffix == ".pgm":
        pixels = np.ascontiguousarray(np.flipud(np.round(raster * 255.0).astype(np.uint8)))
        if ground_truth is not None:
            _mark_pose(pixels, grid, ground_truth, GROUND_TRUTH_MARK)
        if estimate is not None:
            _mark_pose(pixels, grid, estimate, ESTIMATE_MARK)
        Image.fromarray(pixels).save(path, format="PPM")
    else:
        # extent assumes an unrotated grid
        x0, y0 = grid.origin.x, grid.origin.y
        extent = (x0, x0 + grid.width * grid.resolution, y0, y0 + grid.height * grid.resolution)
        fig = Figure(figsize=(8, 8))
        ax = fig.add_subplot(1, 1, 1)
        image = ax.imshow(raster, origin="lower", extent=extent, cmap="inferno", vmin=0.0, vmax=1.0)
        obstacles = np.ma.masked_where(~grid.occupied_mask, np.ones_like(raster))
        ax.imshow(obstacles, origin="lower", extent=extent, cmap="Greys", vmin=0.0, vmax=1.0, alpha=0.6)
        if ground_truth is not None:
            ax.plot(ground_truth.x, ground_truth.y, "o", color="lime", markersize=8, label="ground truth")
        if estimate is not None:
            ax.plot(estimate.x, estimate.y, "x", color="cyan", markersize=10, mew=2, label="estimate")
        if ground_truth is not None or estimate is not None:
            ax.legend(loc="upper right")
        ax.set_title(f"{Modality(modality).value} likelihood")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        fig.colorbar(image, ax=ax, fraction=0.046)
        fig.savefig(path, format=suffix.lstrip("."), bbox_inches="tight")

    logger.info(f"Saved {Modality(modality).value} heatmap to {path}")
    return path
