"""Maximum-likelihood pose extraction."""

import math
from dataclasses import dataclass

import numpy as np

from src.geometry.pose import Pose2D, wrap_angle
from src.mcl.hypotheses import HypothesisSet, Modality

TIE_EPSILON = 1e-9
_HEADING_EPS = 1e-6


@dataclass(frozen=True, eq=False)
class EstimateResult:
    """
    Average of every hypothesis tied at the maximum log-likelihood.

    ``degenerate_heading`` marks a heading taken from the first tied pose
    because the tied headings cancel out; ``low_confidence`` marks an
    estimate where every hypothesis tied.
    """

    pose: Pose2D
    tie_count: int
    max_ll: float
    modality: Modality
    tie_indices: np.ndarray
    degenerate_heading: bool = False
    low_confidence: bool = False


def circular_mean(angles: np.ndarray):
    """(mean angle in [-pi, pi), degenerate flag)."""
    s, c = float(np.sum(np.sin(angles))), float(np.sum(np.cos(angles)))
    if math.hypot(s, c) < _HEADING_EPS:
        return wrap_angle(float(angles[0])), True
    return wrap_angle(math.atan2(s, c)), False


def map_estimate(hyps: HypothesisSet, modality: Modality, tie_epsilon: float = TIE_EPSILON) -> EstimateResult:
    """
    Mean of the maximum-likelihood hypotheses.

    Args:
        hyps: Evaluated hypotheses
        modality: Which log-likelihood to maximize
        tie_epsilon: Hypotheses within this of the maximum tie

    Returns:
        Estimate with tie statistics
    """
    modality = Modality(modality)
    ll = hyps.log_likelihoods(modality)
    best = float(np.max(ll))
    if math.isinf(best) and best < 0:
        tied = np.ones(len(ll), dtype=bool)
    else:
        tied = ll >= best - tie_epsilon
    indices = np.flatnonzero(tied)
    chosen = hyps.poses[indices]

    theta, degenerate = circular_mean(chosen[:, 2])
    pose = Pose2D(float(np.mean(chosen[:, 0])), float(np.mean(chosen[:, 1])), theta)
    return EstimateResult(
        pose=pose,
        tie_count=int(indices.size),
        max_ll=best,
        modality=modality,
        tie_indices=indices,
        degenerate_heading=degenerate,
        low_confidence=len(ll) > 1 and indices.size == len(ll),
    )
