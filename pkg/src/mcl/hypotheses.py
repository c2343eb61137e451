"""Pose hypothesis sets and uniform sampling over free space."""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from src.geometry.pose import Pose2D, poses_to_array
from src.maps.occupancy import OccupancyGridMap
from src.utils.errors import InvalidArgumentError, UnsampleableMapError
from src.utils.logger import logger

DEFAULT_HYPOTHESIS_COUNT = 1_000_000


class Modality(str, Enum):
    VISION = "vision"
    SCAN = "scan"
    FUSED = "fused"


@dataclass(frozen=True, eq=False)
class HypothesisSet:
    """
    P pose hypotheses as a (P, 3) array plus their per-pose evaluations.

    Evaluation fields stay ``None`` until :class:`HypothesisEvaluator` fills
    them; ``scan_outside`` flags poses that fell outside the grid.
    """

    poses: np.ndarray
    seed: int
    vision_score: Optional[np.ndarray] = None
    vision_ll: Optional[np.ndarray] = None
    scan_ll: Optional[np.ndarray] = None
    fused_ll: Optional[np.ndarray] = None
    scan_outside: Optional[np.ndarray] = None

    def __post_init__(self):
        poses = np.asarray(self.poses, dtype=np.float64).reshape(-1, 3)
        object.__setattr__(self, "poses", poses)
        for name in ("vision_score", "vision_ll", "scan_ll", "fused_ll", "scan_outside"):
            values = getattr(self, name)
            if values is not None and len(values) != len(poses):
                raise InvalidArgumentError(f"{name} has {len(values)} entries for {len(poses)} poses")

    def __len__(self) -> int:
        return int(self.poses.shape[0])

    def pose(self, index: int) -> Pose2D:
        return Pose2D.from_sequence(self.poses[index])

    def with_poses(self, poses: Sequence[Pose2D]) -> "HypothesisSet":
        """Append explicit poses; evaluations are discarded."""
        extra = poses_to_array(list(poses))
        return HypothesisSet(np.concatenate([self.poses, extra]), self.seed)

    def with_values(self, **values) -> "HypothesisSet":
        return replace(self, **values)

    def log_likelihoods(self, modality: Modality) -> np.ndarray:
        values = {
            Modality.VISION: self.vision_ll,
            Modality.SCAN: self.scan_ll,
            Modality.FUSED: self.fused_ll,
        }[Modality(modality)]
        if values is None:
            raise InvalidArgumentError(f"Hypotheses have no {Modality(modality).value} log-likelihoods")
        return values


def sample_uniform(grid: OccupancyGridMap, count: int = DEFAULT_HYPOTHESIS_COUNT, seed: int = 0) -> HypothesisSet:
    """
    Draw hypotheses uniformly over free space.

    A free cell is chosen uniformly, the position is jittered uniformly within
    it, and the heading is drawn from [-pi, pi).

    Args:
        grid: Occupancy grid
        count: Number of hypotheses
        seed: Random seed

    Returns:
        Unevaluated hypothesis set
    """
    if count < 1:
        raise InvalidArgumentError(f"Hypothesis count must be >= 1, got {count}")
    free = grid.free_cell_array()
    if free.shape[0] == 0:
        raise UnsampleableMapError("Occupancy grid has no free cells to sample from")

    rng = np.random.default_rng(seed)
    picks = free[rng.integers(free.shape[0], size=count)]
    jitter = rng.random((count, 2))
    theta = rng.uniform(-math.pi, math.pi, size=count)

    # grid coordinates are (col, row)
    coords = np.stack([picks[:, 1] + jitter[:, 0], picks[:, 0] + jitter[:, 1]], axis=1)
    xy = grid.grid_to_world(coords)
    poses = np.column_stack([xy, theta])
    logger.debug(f"Sampled {count} hypotheses over {free.shape[0]} free cells (seed {seed})")
    return HypothesisSet(poses, seed)
