"""Simulated detector: ground-truth visibility plus a noise model."""

from typing import List, Optional

import numpy as np

from src.detection.noise import NoiseModel
from src.detection.observation import LabelObservation, ObservationSource
from src.geometry.pose import Pose2D
from src.maps.footprint import LabeledFootprintMap
from src.maps.occupancy import OccupancyGridMap
from src.visibility.camera import CameraRig
from src.visibility.simulator import OcclusionMode, VisibilityResult, VisibilitySimulator


def corrupt_visibility(
    visible: VisibilityResult,
    labels: List[str],
    noise: NoiseModel,
) -> List[set]:
    """
    Apply drop, confusion and false-positive noise, in that order.

    Labels are visited in sorted order so a seed fixes the outcome.
    """
    if noise.is_noiseless:
        return [set(s) for s in visible.per_camera]

    rng = np.random.default_rng(noise.seed)
    corrupted = []
    for seen in visible.per_camera:
        reported = set()
        for label in sorted(seen):
            if rng.random() < noise.drop_prob:
                continue
            targets = noise.confusion.get(label)
            if targets:
                label = targets[int(rng.integers(len(targets)))]
            reported.add(label)
        for label in labels:
            if label in reported:
                continue
            if rng.random() < noise.false_positive_prob:
                reported.add(label)
        corrupted.append(reported)
    return corrupted


def oracle_detect(
    true_pose: Pose2D,
    rig: CameraRig,
    footprint_map: LabeledFootprintMap,
    noise: Optional[NoiseModel] = None,
    occlusion: OcclusionMode = OcclusionMode.NONE,
    grid: Optional[OccupancyGridMap] = None,
    simulator: Optional[VisibilitySimulator] = None,
) -> LabelObservation:
    """
    Detect labels as a perfect camera would, then corrupt them.

    Args:
        true_pose: Ground-truth robot pose
        rig: Camera rig
        footprint_map: Labeled footprint map
        noise: Corruption model; ``None`` means noiseless
        occlusion: Visibility occlusion mode
        grid: Occupancy grid for ``grid-occluded`` visibility
        simulator: Prebuilt visibility kernel to reuse across calls

    Returns:
        Observation with ``source = oracle``
    """
    noise = noise or NoiseModel()
    simulator = simulator or VisibilitySimulator(footprint_map, rig, occlusion, grid)
    visible = simulator.simulate(true_pose)
    reported = corrupt_visibility(visible, list(footprint_map.labels), noise)
    return LabelObservation.from_label_lists(reported, footprint_map.label_set, ObservationSource.ORACLE)
