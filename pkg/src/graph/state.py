"""LangGraph state definitions."""

from typing import Optional, TypedDict

from src.detection.observation import LabelObservation
from src.evaluation.metrics import MetricRow
from src.likelihood.scan import ScanObservation
from src.mcl.estimate import EstimateResult
from src.mcl.hypotheses import HypothesisSet
from src.simworld.records import DatasetRecord


class LocalizationState(TypedDict, total=False):
    """State for localizing one dataset record."""

    # Input record and its position in the dataset
    record: DatasetRecord
    record_index: int

    # Requested modality and the one actually used
    requested_modality: str
    modality: str

    # Observations; None when unavailable
    observation: Optional[LabelObservation]
    scan: Optional[ScanObservation]

    # Detection fell back to scan-only
    degraded: bool
    detection_error: str

    # Hypotheses and result
    hypotheses: HypothesisSet
    estimate: EstimateResult
    metric: MetricRow

    # perf_counter() at entry
    started_at: float

    # Next action to take: "sample" or "fail"
    next_action: str
