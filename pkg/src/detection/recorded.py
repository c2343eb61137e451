"""Replay of label observations stored in dataset records."""

from typing import Any, Iterable, Optional

from pydantic import ValidationError

from src.detection.observation import LabelObservation, ObservationSource
from src.simworld.records import DatasetRecord
from src.utils.errors import DatasetParseError


def load_recorded_observation(record: Any, known_labels: Optional[Iterable[str]] = None) -> LabelObservation:
    """
    Observation stored in a dataset record.

    Args:
        record: :class:`DatasetRecord` or its decoded document
        known_labels: Map labels; others are flagged off-map. When omitted
            every label counts as on-map.

    Returns:
        Observation with ``source = recorded``
    """
    if not isinstance(record, DatasetRecord):
        try:
            record = DatasetRecord.model_validate(record)
        except ValidationError as e:
            raise DatasetParseError(f"Invalid dataset record: {e}") from e
    if record.labels is None:
        raise DatasetParseError(
            "Record holds camera images, not labels; run detection first",
            details={"t": record.t},
        )
    if known_labels is None:
        known_labels = {label.strip() for labels in record.labels for label in labels}
    return LabelObservation.from_label_lists(record.labels, known_labels, ObservationSource.RECORDED)
