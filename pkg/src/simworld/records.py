"""Newline-delimited dataset records."""

import json
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from src.geometry.pose import Pose2D
from src.likelihood.scan import ScanObservation
from src.utils.errors import DatasetParseError, InvalidArgumentError
from src.utils.logger import logger


class ScanDocument(BaseModel):
    """Laser scan in the usual angle_min / angle_increment / ranges layout."""

    angle_min: float
    angle_increment: float
    ranges: List[Optional[float]]
    range_max: float = Field(default=12.0, gt=0)

    def to_observation(self) -> ScanObservation:
        ranges = [float("nan") if r is None else r for r in self.ranges]
        return ScanObservation.from_ranges(self.angle_min, self.angle_increment, ranges, self.range_max)


class DatasetRecord(BaseModel):
    """
    One recorded instant.

    Exactly one of ``labels`` (per-camera label lists) and ``images``
    (per-camera image paths) is present.
    """

    t: float
    pose_gt: Tuple[float, float, float]
    scan: Optional[ScanDocument] = None
    labels: Optional[List[List[str]]] = None
    images: Optional[List[str]] = None

    @model_validator(mode="after")
    def _labels_or_images(self) -> "DatasetRecord":
        if (self.labels is None) == (self.images is None):
            raise ValueError("a record carries exactly one of 'labels' or 'images'")
        return self

    @property
    def pose(self) -> Pose2D:
        return Pose2D.from_sequence(self.pose_gt)

    def scan_observation(self) -> Optional[ScanObservation]:
        if self.scan is None:
            return None
        try:
            return self.scan.to_observation()
        except InvalidArgumentError as e:
            raise DatasetParseError(f"Invalid scan at t={self.t}: {e}") from e


def dump_record(record: DatasetRecord) -> str:
    """Canonical one-line JSON; key order is fixed by the model."""
    return json.dumps(record.model_dump(mode="json", exclude_none=True), separators=(",", ":"))


def save_dataset(records: Iterable[DatasetRecord], path: Union[str, Path]) -> int:
    """Write records one per line; returns the number written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(dump_record(record) + "\n")
            count += 1
    logger.info(f"Saved {count} records to {path}")
    return count


def load_dataset(path: Union[str, Path]) -> List[DatasetRecord]:
    """
    Read a newline-delimited dataset.

    Blank lines are skipped; the first malformed line raises
    :class:`DatasetParseError` naming its line number.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset not found: {path}")

    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(DatasetRecord.model_validate_json(line))
            except ValidationError as e:
                raise DatasetParseError(
                    f"{path}:{line_no}: invalid record: {e}",
                    details={"line": line_no},
                ) from e
    logger.info(f"Loaded {len(records)} records from {path}")
    return records
