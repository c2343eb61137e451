"""Two-pass likelihood evaluation of hypothesis sets."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np

from src.config import config
from src.detection.observation import LabelObservation
from src.likelihood.fusion import fused_log_likelihood
from src.likelihood.params import ScanLikelihoodParams, VisionLikelihoodParams
from src.likelihood.scan import ScanObservation, scan_log_likelihoods
from src.likelihood.vision import consistency_scores, score_mean, vision_log_likelihoods
from src.maps.distance_field import DistanceField, build_distance_field
from src.maps.footprint import LabeledFootprintMap
from src.maps.occupancy import OccupancyGridMap
from src.mcl.hypotheses import HypothesisSet, Modality
from src.utils.errors import InvalidArgumentError
from src.utils.logger import logger
from src.visibility.camera import CameraRig
from src.visibility.simulator import OcclusionMode, VisibilitySimulator


class HypothesisEvaluator:
    """
    Scores hypothesis sets against one map pair.

    The visibility kernel and distance field are built once and shared by
    every evaluation; chunks are written into disjoint slices so the worker
    count never changes the result.
    """

    def __init__(
        self,
        footprint_map: LabeledFootprintMap,
        rig: CameraRig,
        grid: Optional[OccupancyGridMap] = None,
        distance_field: Optional[DistanceField] = None,
        vision_params: Optional[VisionLikelihoodParams] = None,
        scan_params: Optional[ScanLikelihoodParams] = None,
        occlusion: OcclusionMode = OcclusionMode.NONE,
        workers: Optional[int] = None,
        chunk_size: Optional[int] = None,
    ):
        self.footprint_map = footprint_map
        self.rig = rig
        self.grid = grid
        self.vision_params = vision_params or VisionLikelihoodParams()
        self.scan_params = scan_params or ScanLikelihoodParams()
        self.workers = max(1, workers or config.workers)
        self.chunk_size = max(1, chunk_size or config.chunk_size)
        self.simulator = VisibilitySimulator(footprint_map, rig, occlusion, grid)
        if distance_field is None and grid is not None:
            distance_field = build_distance_field(grid)
        self.distance_field = distance_field

    def _run_chunks(self, total: int, work: Callable[[slice], None]) -> None:
        slices = [slice(start, min(start + self.chunk_size, total)) for start in range(0, total, self.chunk_size)]
        if self.workers == 1 or len(slices) <= 1:
            for s in slices:
                work(s)
            return
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            # list() surfaces worker exceptions
            list(pool.map(work, slices))

    def vision_scores(self, poses: np.ndarray, obs: LabelObservation) -> np.ndarray:
        """Pass 1: consistency score per pose."""
        if obs.camera_count != self.simulator.camera_count:
            raise InvalidArgumentError(
                f"Observation has {obs.camera_count} cameras, rig has {self.simulator.camera_count}",
                details={"observed": obs.camera_count, "rig": self.simulator.camera_count},
            )
        scores = np.zeros(len(poses), dtype=np.int64)
        obs_mask = obs.masks(self.footprint_map.label_index)
        if not obs_mask.any():
            return scores

        def work(s: slice) -> None:
            scores[s] = consistency_scores(obs_mask, self.simulator.simulate_masks(poses[s]))

        self._run_chunks(len(poses), work)
        return scores

    def scan_values(self, poses: np.ndarray, scan: ScanObservation):
        if self.distance_field is None:
            raise InvalidArgumentError("Scan likelihood requires an occupancy grid")
        scan = scan.subsample(self.scan_params.max_beams)
        values = np.empty(len(poses), dtype=np.float64)
        outside = np.zeros(len(poses), dtype=bool)

        def work(s: slice) -> None:
            values[s], outside[s] = scan_log_likelihoods(poses[s], scan, self.distance_field, self.scan_params)

        self._run_chunks(len(poses), work)
        return values, outside

    def evaluate(
        self,
        hyps: HypothesisSet,
        obs: Optional[LabelObservation] = None,
        scan: Optional[ScanObservation] = None,
    ) -> HypothesisSet:
        """
        Fill the log-likelihoods the given observations support.

        Vision scores are computed for the whole set before the sigmoid is
        applied, since the mean score normalizes every value. Fused values
        are filled when both modalities are present.

        Args:
            hyps: Hypotheses to score
            obs: Label observation, if vision is available
            scan: Scan observation, if a scan is available

        Returns:
            A new hypothesis set with evaluations filled
        """
        if obs is None and scan is None:
            raise InvalidArgumentError("Nothing to evaluate: neither labels nor scan given")
        if len(hyps) == 0:
            raise InvalidArgumentError("Cannot evaluate an empty hypothesis set")

        values = {}
        if obs is not None:
            scores = self.vision_scores(hyps.poses, obs)
            mean = score_mean(scores)
            values["vision_score"] = scores
            values["vision_ll"] = vision_log_likelihoods(scores, self.vision_params.alpha, mean)
            logger.debug(f"Vision pass: mean score {mean:.4f}, max {int(scores.max())}")
        if scan is not None:
            values["scan_ll"], values["scan_outside"] = self.scan_values(hyps.poses, scan)
        if obs is not None and scan is not None:
            values["fused_ll"] = fused_log_likelihood(
                values["vision_ll"], values["scan_ll"], self.scan_params.fusion_lambda
            )
        return hyps.with_values(**values)


def evaluate(
    hyps: HypothesisSet,
    obs: Optional[LabelObservation],
    scan: Optional[ScanObservation],
    footprint_map: LabeledFootprintMap,
    rig: CameraRig,
    grid: Optional[OccupancyGridMap] = None,
    vision_params: Optional[VisionLikelihoodParams] = None,
    scan_params: Optional[ScanLikelihoodParams] = None,
    occlusion: OcclusionMode = OcclusionMode.NONE,
) -> HypothesisSet:
    """One-shot form of :meth:`HypothesisEvaluator.evaluate`."""
    evaluator = HypothesisEvaluator(
        footprint_map, rig, grid, vision_params=vision_params, scan_params=scan_params, occlusion=occlusion
    )
    return evaluator.evaluate(hyps, obs, scan)


def required_inputs(modality: Modality):
    """(needs labels, needs scan) for a modality."""
    modality = Modality(modality)
    return modality in (Modality.VISION, Modality.FUSED), modality in (Modality.SCAN, Modality.FUSED)
