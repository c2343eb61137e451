"""Human-readable labeled footprint maps."""

import string
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Tuple, Union

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from src.geometry.shapes import Polygon
from src.utils.errors import GeometryError, MapParseError, MapValidationError
from src.utils.logger import logger


class LandmarkDocument(BaseModel):
    """One ``landmarks`` entry of a footprint map file."""

    label: str
    polygon: List[Tuple[float, float]]

    @field_validator("label")
    @classmethod
    def _label_not_blank(cls, value: str) -> str:
        value = value.strip()
        if not value:
            raise ValueError("label must be non-empty")
        return value


class FootprintMapDocument(BaseModel):
    """Top level of a footprint map file."""

    frame: str = "map"
    landmarks: List[Any] = Field(default_factory=list)


def footprint_map_schema() -> Dict[str, Any]:
    """JSON schema of a footprint map file, landmark entries included."""
    schema = FootprintMapDocument.model_json_schema()
    landmark = LandmarkDocument.model_json_schema()
    landmark["properties"]["label"]["minLength"] = 1
    landmark["properties"]["polygon"]["minItems"] = 3
    schema["properties"]["landmarks"]["items"] = landmark
    return schema


@dataclass(frozen=True)
class Landmark:
    label: str
    footprint: Polygon

    def __post_init__(self):
        label = self.label.strip()
        if not label:
            raise MapValidationError("Landmark label must be non-empty")
        object.__setattr__(self, "label", label)


@dataclass(frozen=True, eq=False)
class LabeledFootprintMap:
    """
    A collection of (label, footprint) pairs in one world frame.

    The same label may appear on several footprints.
    """

    landmarks: Tuple[Landmark, ...]
    frame: str = "map"

    def __post_init__(self):
        object.__setattr__(self, "landmarks", tuple(self.landmarks))

    @cached_property
    def label_set(self) -> FrozenSet[str]:
        return frozenset(lm.label for lm in self.landmarks)

    @cached_property
    def labels(self) -> Tuple[str, ...]:
        """Distinct labels in sorted order; positions define label indices."""
        return tuple(sorted(self.label_set))

    @cached_property
    def label_index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.landmarks)

    def without_labels(self, labels: Iterable[str]) -> "LabeledFootprintMap":
        """Drop every landmark carrying one of ``labels``."""
        excluded = {label.strip() for label in labels}
        kept = tuple(lm for lm in self.landmarks if lm.label not in excluded)
        logger.info(f"Excluded labels {sorted(excluded)}: {len(self.landmarks) - len(kept)} landmarks removed")
        return LabeledFootprintMap(kept, self.frame)

    def relabeled(self, mapping: Mapping[str, str]) -> "LabeledFootprintMap":
        """Apply a label -> label mapping; unmapped labels are kept."""
        return LabeledFootprintMap(
            tuple(Landmark(mapping.get(lm.label, lm.label), lm.footprint) for lm in self.landmarks),
            self.frame,
        )

    def with_unique_labels(self) -> "LabeledFootprintMap":
        """
        Give every landmark its own alphanumeric tile label (A1, B1, ... Z1, A2, ...).

        Geometry is untouched, so the result describes the same scene with
        one-to-one label/appearance correspondence.
        """
        letters = string.ascii_uppercase
        return LabeledFootprintMap(
            tuple(
                Landmark(f"{letters[i % 26]}{i // 26 + 1}", lm.footprint)
                for i, lm in enumerate(self.landmarks)
            ),
            self.frame,
        )

    def to_document(self) -> dict:
        return {
            "frame": self.frame,
            "landmarks": [
                {"label": lm.label, "polygon": [[x, y] for x, y in lm.footprint.vertices]}
                for lm in self.landmarks
            ],
        }


def parse_footprint_document(raw: object, source: str = "<document>") -> LabeledFootprintMap:
    """
    Validate a decoded footprint map document.

    Args:
        raw: Decoded YAML/JSON content
        source: Name used in error messages

    Returns:
        Validated footprint map
    """
    try:
        document = FootprintMapDocument.model_validate(raw)
    except ValidationError as e:
        raise MapParseError(f"{source}: malformed footprint map: {e}") from e

    landmarks = []
    for index, entry in enumerate(document.landmarks):
        try:
            item = LandmarkDocument.model_validate(entry)
        except ValidationError as e:
            raise MapParseError(
                f"{source}: landmark {index} is malformed: {e}",
                details={"landmark_index": index},
            ) from e
        try:
            polygon = Polygon.from_points(item.polygon)
        except GeometryError as e:
            raise MapValidationError(
                f"{source}: landmark {index} ({item.label!r}) has a degenerate polygon: {e}",
                details={"landmark_index": index, "label": item.label},
            ) from e
        landmarks.append(Landmark(item.label, polygon))

    return LabeledFootprintMap(tuple(landmarks), document.frame)


def load_footprint_map(path: Union[str, Path]) -> LabeledFootprintMap:
    """
    Load a labeled footprint map file (YAML; JSON is accepted as YAML).

    Args:
        path: Path to the map document

    Returns:
        Validated footprint map
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Footprint map not found: {path}")

    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise MapParseError(f"{path}: not a valid YAML/JSON document: {e}") from e

    footprint_map = parse_footprint_document(raw, source=str(path))
    logger.info(
        f"Loaded footprint map {path.name}: {len(footprint_map)} landmarks, "
        f"{len(footprint_map.label_set)} distinct labels"
    )
    return footprint_map


def save_footprint_map(footprint_map: LabeledFootprintMap, path: Union[str, Path]) -> None:
    """Write a footprint map as YAML; floats keep their shortest round-trip repr."""
    path = Path(path)
    path.write_text(
        yaml.safe_dump(footprint_map.to_document(), sort_keys=False, allow_unicode=True),
        encoding="utf-8",
    )
    logger.info(f"Saved footprint map with {len(footprint_map)} landmarks to {path}")
