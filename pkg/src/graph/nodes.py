"""LangGraph workflow nodes."""

import threading
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from src.detection.recorded import load_recorded_observation
from src.detection.vlm_client import VlmClient, vlm_detect
from src.evaluation.metrics import MetricRow, rot_error, trans_error
from src.graph.state import LocalizationState
from src.maps.footprint import LabeledFootprintMap
from src.maps.occupancy import OccupancyGridMap
from src.mcl.estimate import map_estimate
from src.mcl.evaluator import HypothesisEvaluator, required_inputs
from src.mcl.hypotheses import Modality, sample_uniform
from src.utils.errors import DetectionUnavailableError, InvalidArgumentError
from src.utils.logger import logger
from src.utils.seeding import derive_seed


@dataclass
class LocalizationContext:
    """Inputs shared by every record of a run; the VLM client is created on first use."""

    footprint_map: LabeledFootprintMap
    grid: OccupancyGridMap
    evaluator: HypothesisEvaluator
    hypothesis_count: int
    tie_epsilon: float
    seed: int
    vlm_client: Optional[VlmClient] = None
    _client_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def get_vlm_client(self) -> VlmClient:
        # record workers share one client
        with self._client_lock:
            if self.vlm_client is None:
                self.vlm_client = VlmClient()
            return self.vlm_client


def observe_node(state: LocalizationState, ctx: LocalizationContext) -> Dict[str, Any]:
    """
    Gather the observations the requested modality needs.

    Labels come from the record or, for image records, from the VLM. A
    detection failure leaves the observation empty and marks the record for
    the scan-only fallback.
    """
    record = state["record"]
    index = state["record_index"]
    needs_labels, needs_scan = required_inputs(state["requested_modality"])
    updates: Dict[str, Any] = {"started_at": time.perf_counter(), "degraded": False, "observation": None}

    scan = record.scan_observation()
    updates["scan"] = scan if scan is not None and len(scan) > 0 else None

    if needs_labels:
        try:
            if record.labels is not None:
                updates["observation"] = load_recorded_observation(record, ctx.footprint_map.label_set)
            else:
                updates["observation"] = vlm_detect(record.images, ctx.footprint_map, client=ctx.get_vlm_client())
        except DetectionUnavailableError as e:
            logger.warning(f"Record {index}: detection unavailable ({e.message})")
            updates["detection_error"] = e.message
    elif not needs_scan:
        raise InvalidArgumentError(f"Unsupported modality {state['requested_modality']}")
    return updates


def route_node(state: LocalizationState) -> Dict[str, Any]:
    """
    Pick the modality this record can support.

    Args:
        state: Current state

    Returns:
        Updated state
    """
    requested = Modality(state["requested_modality"])
    has_labels = state.get("observation") is not None
    has_scan = state.get("scan") is not None
    index = state["record_index"]

    if requested is Modality.SCAN:
        if not has_scan:
            raise InvalidArgumentError(f"Record {index} has no usable scan", details={"record_index": index})
        return {"modality": Modality.SCAN.value, "next_action": "sample"}

    if has_labels:
        if requested is Modality.FUSED and not has_scan:
            raise InvalidArgumentError(
                f"Record {index} has no usable scan for fused localization", details={"record_index": index}
            )
        return {"modality": requested.value, "next_action": "sample"}

    if has_scan:
        logger.warning(f"Record {index}: falling back to scan-only localization")
        return {"modality": Modality.SCAN.value, "degraded": True, "next_action": "sample"}
    return {"next_action": "fail"}


def fail_node(state: LocalizationState) -> Dict[str, Any]:
    index = state["record_index"]
    raise DetectionUnavailableError(
        f"Record {index}: detection unavailable and no scan to fall back to",
        details={"record_index": index, "cause": state.get("detection_error", "")},
    )


def sample_node(state: LocalizationState, ctx: LocalizationContext) -> Dict[str, Any]:
    """Draw a fresh hypothesis set from the per-record seed."""
    seed = derive_seed(ctx.seed, state["record_index"])
    return {"hypotheses": sample_uniform(ctx.grid, ctx.hypothesis_count, seed)}


def evaluate_node(state: LocalizationState, ctx: LocalizationContext) -> Dict[str, Any]:
    needs_labels, needs_scan = required_inputs(state["modality"])
    hyps = ctx.evaluator.evaluate(
        state["hypotheses"],
        state.get("observation") if needs_labels else None,
        state.get("scan") if needs_scan else None,
    )
    return {"hypotheses": hyps}


def estimate_node(state: LocalizationState, ctx: LocalizationContext) -> Dict[str, Any]:
    estimate = map_estimate(state["hypotheses"], state["modality"], ctx.tie_epsilon)
    if estimate.low_confidence:
        logger.info(f"Record {state['record_index']}: every hypothesis tied (low confidence)")
    return {"estimate": estimate}


def metrics_node(state: LocalizationState) -> Dict[str, Any]:
    estimate = state["estimate"]
    gt = state["record"].pose
    metric = MetricRow(
        record_index=state["record_index"],
        e_trans=trans_error(estimate.pose, gt),
        e_rot=rot_error(estimate.pose, gt),
        tie_count=estimate.tie_count,
        modality=state["requested_modality"],
        degraded=state.get("degraded", False),
        wall_time=time.perf_counter() - state["started_at"],
    )
    logger.debug(
        f"Record {metric.record_index}: e_trans {metric.e_trans:.3f} m, e_rot {metric.e_rot:.3f} rad, "
        f"ties {metric.tie_count}"
    )
    return {"metric": metric}
