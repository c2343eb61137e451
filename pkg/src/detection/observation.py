"""Visible-label observations."""

from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, List, Mapping, Tuple

import numpy as np


class ObservationSource(str, Enum):
    ORACLE = "oracle"
    VLM = "vlm"
    RECORDED = "recorded"


@dataclass(frozen=True)
class LabelObservation:
    """
    Per-camera label sets reported by a detector.

    ``off_map`` holds, per camera, reported labels that the footprint map does
    not contain; they are kept for diagnostics and never scored.
    """

    per_camera: Tuple[FrozenSet[str], ...]
    source: ObservationSource = ObservationSource.ORACLE
    off_map: Tuple[FrozenSet[str], ...] = field(default=())

    def __post_init__(self):
        per_camera = tuple(frozenset(labels) for labels in self.per_camera)
        off_map = tuple(frozenset(labels) for labels in self.off_map) or tuple(
            frozenset() for _ in per_camera
        )
        object.__setattr__(self, "per_camera", per_camera)
        object.__setattr__(self, "off_map", off_map)
        object.__setattr__(self, "source", ObservationSource(self.source))

    @classmethod
    def from_label_lists(
        cls,
        label_lists: Iterable[Iterable[str]],
        known_labels: Iterable[str],
        source: ObservationSource = ObservationSource.RECORDED,
    ) -> "LabelObservation":
        """Split raw label lists into on-map and off-map sets."""
        known = frozenset(known_labels)
        on_map: List[FrozenSet[str]] = []
        off_map: List[FrozenSet[str]] = []
        for labels in label_lists:
            labels = {label.strip() for label in labels if label.strip()}
            on_map.append(frozenset(labels & known))
            off_map.append(frozenset(labels - known))
        return cls(tuple(on_map), source, tuple(off_map))

    @property
    def camera_count(self) -> int:
        return len(self.per_camera)

    @property
    def is_empty(self) -> bool:
        return not any(self.per_camera)

    def to_label_lists(self) -> List[List[str]]:
        """Sorted label lists per camera, off-map labels included."""
        return [sorted(on | off) for on, off in zip(self.per_camera, self.off_map)]

    def masks(self, label_index: Mapping[str, int]) -> np.ndarray:
        """
        Boolean (N, L) camera x label matrix.

        Labels missing from ``label_index`` are left out.
        """
        mask = np.zeros((self.camera_count, len(label_index)), dtype=bool)
        for cam, labels in enumerate(self.per_camera):
            for label in labels:
                j = label_index.get(label)
                if j is not None:
                    mask[cam, j] = True
        return mask


def empty_observation(camera_count: int, source: ObservationSource = ObservationSource.ORACLE) -> LabelObservation:
    return LabelObservation(tuple(frozenset() for _ in range(camera_count)), source)
