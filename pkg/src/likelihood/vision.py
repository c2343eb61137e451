"""Vision consistency score and its sigmoid likelihood."""

import math
from typing import Optional

import numpy as np

from src.detection.observation import LabelObservation
from src.utils.errors import InvalidArgumentError
from src.visibility.simulator import VisibilityResult


def consistency_score(obs: LabelObservation, sim: VisibilityResult) -> int:
    """
    Sum over cameras of the observed/simulated label intersections.

    Off-map labels are held separately by the observation and never count.
    """
    if obs.camera_count != len(sim.per_camera):
        raise InvalidArgumentError(
            f"Observation has {obs.camera_count} cameras but simulation has {len(sim.per_camera)}",
            details={"observed": obs.camera_count, "simulated": len(sim.per_camera)},
        )
    return sum(len(seen & expected) for seen, expected in zip(obs.per_camera, sim.per_camera))


def consistency_scores(obs_mask: np.ndarray, sim_masks: np.ndarray) -> np.ndarray:
    """
    Vectorized consistency scores.

    Args:
        obs_mask: (N, L) observed label mask
        sim_masks: (K, N, L) simulated masks

    Returns:
        (K,) int64 scores
    """
    if sim_masks.ndim != 3 or sim_masks.shape[1:] != obs_mask.shape:
        raise InvalidArgumentError(
            f"Mask shapes disagree: observation {obs_mask.shape}, simulation {sim_masks.shape}"
        )
    return np.count_nonzero(sim_masks & obs_mask[None, :, :], axis=(1, 2)).astype(np.int64)


def score_mean(scores: np.ndarray) -> float:
    """Mean score from an exact sum, independent of evaluation order."""
    scores = np.asarray(scores)
    if scores.size == 0:
        raise InvalidArgumentError("Cannot normalize an empty score list")
    if np.issubdtype(scores.dtype, np.integer):
        return int(scores.astype(np.int64).sum()) / scores.size
    return math.fsum(scores.ravel().tolist()) / scores.size


def vision_log_likelihoods(scores, alpha: float = 0.5, mean: Optional[float] = None) -> np.ndarray:
    """
    log sigmoid(alpha * (score - mean score)) for every hypothesis.

    The mean is taken over the whole set unless given, so callers that
    evaluate in chunks pass the global mean from a first pass.

    Args:
        scores: Integer consistency scores
        alpha: Sigmoid scale
        mean: Precomputed mean score

    Returns:
        Log-likelihoods in (-inf, 0)
    """
    if alpha <= 0:
        raise InvalidArgumentError(f"alpha must be positive, got {alpha}")
    scores = np.asarray(scores)
    if scores.size == 0:
        raise InvalidArgumentError("Cannot normalize an empty score list")
    mu = score_mean(scores) if mean is None else mean
    z = alpha * (scores.astype(np.float64) - mu)
    # log sigmoid(z) = -log(1 + exp(-z))
    return -np.logaddexp(0.0, -z)
