"""Localization error metrics, metric tables and summaries."""

import csv
import json
import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field

from src.geometry.pose import Pose2D, wrap_angle
from src.utils.logger import logger

CSV_COLUMNS = ["record_index", "e_trans", "e_rot", "tie_count", "modality", "degraded"]
SUMMARY_SCHEMA_VERSION = 1


def trans_error(est: Pose2D, gt: Pose2D) -> float:
    """Euclidean distance between estimated and ground-truth positions."""
    return math.hypot(est.x - gt.x, est.y - gt.y)


def rot_error(est: Pose2D, gt: Pose2D) -> float:
    """Absolute wrapped heading difference in [0, pi]."""
    return abs(wrap_angle(est.theta - gt.theta))


class MetricRow(BaseModel):
    record_index: int
    e_trans: float = Field(ge=0.0)
    e_rot: float = Field(ge=0.0, le=math.pi)
    tie_count: int = Field(ge=1)
    modality: str
    degraded: bool = False
    wall_time: float = 0.0


class ModalityStats(BaseModel):
    count: int
    e_trans_mean: float
    e_trans_std: float
    e_rot_mean: float
    e_rot_std: float
    degraded: int = 0


class BenchmarkSummary(BaseModel):
    """Mean and population standard deviation of the errors per modality."""

    schema_version: int = SUMMARY_SCHEMA_VERSION
    record_count: int
    config_digest: str
    modalities: Dict[str, ModalityStats] = Field(default_factory=dict)
    label: Optional[str] = None


def _mean_std(values: Sequence[float]):
    if not values:
        return float("nan"), float("nan")
    arr = np.asarray(values, dtype=np.float64)
    return float(np.mean(arr)), float(np.std(arr))


def summarize(rows: Sequence[MetricRow], config_digest: str, label: Optional[str] = None) -> BenchmarkSummary:
    """
    Aggregate metric rows per modality.

    Args:
        rows: Metric rows (any modalities)
        config_digest: Digest of the run configuration
        label: Optional name (archetype, dataset)

    Returns:
        Summary; modalities with no rows are absent
    """
    by_modality: Dict[str, List[MetricRow]] = {}
    for row in rows:
        by_modality.setdefault(row.modality, []).append(row)

    stats = {}
    for modality in sorted(by_modality):
        group = by_modality[modality]
        t_mean, t_std = _mean_std([r.e_trans for r in group])
        r_mean, r_std = _mean_std([r.e_rot for r in group])
        stats[modality] = ModalityStats(
            count=len(group),
            e_trans_mean=t_mean,
            e_trans_std=t_std,
            e_rot_mean=r_mean,
            e_rot_std=r_std,
            degraded=sum(1 for r in group if r.degraded),
        )
    return BenchmarkSummary(record_count=len(rows), config_digest=config_digest, modalities=stats, label=label)


def write_metrics_csv(rows: Iterable[MetricRow], path: Union[str, Path], timings: bool = False) -> None:
    """Write rows with fixed float formatting; ``wall_time`` only when ``timings``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = CSV_COLUMNS + (["wall_time"] if timings else [])
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            values = [
                row.record_index,
                repr(float(row.e_trans)),
                repr(float(row.e_rot)),
                row.tie_count,
                row.modality,
                int(row.degraded),
            ]
            if timings:
                values.append(f"{row.wall_time:.6f}")
            writer.writerow(values)
    logger.info(f"Wrote metrics to {path}")


def read_metrics_csv(path: Union[str, Path]) -> List[MetricRow]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Metrics file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        return [
            MetricRow(
                record_index=int(r["record_index"]),
                e_trans=float(r["e_trans"]),
                e_rot=float(r["e_rot"]),
                tie_count=int(r["tie_count"]),
                modality=r["modality"],
                degraded=bool(int(r.get("degraded") or 0)),
                wall_time=float(r.get("wall_time") or 0.0),
            )
            for r in reader
        ]


def write_summary(summary: BenchmarkSummary, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(summary.model_dump(mode="json"), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote summary to {path}")
