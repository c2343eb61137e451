"""Detector corruption model used by the oracle."""

from typing import Dict, List

from pydantic import BaseModel, Field, field_validator


class NoiseModel(BaseModel):
    """
    Independent per-label corruption of a perfect detection.

    ``confusion`` maps a label to the labels it may be reported as; a retained
    label with an entry is replaced by a uniform choice among them.
    """

    drop_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    false_positive_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    confusion: Dict[str, List[str]] = Field(default_factory=dict)
    seed: int = 0

    @field_validator("confusion")
    @classmethod
    def _non_empty_targets(cls, value: Dict[str, List[str]]) -> Dict[str, List[str]]:
        for label, targets in value.items():
            if not targets:
                raise ValueError(f"confusion entry for {label!r} has no target labels")
        # sorted targets keep the uniform draw independent of document order
        return {label.strip(): sorted({t.strip() for t in targets}) for label, targets in value.items()}

    @property
    def is_noiseless(self) -> bool:
        return self.drop_prob == 0.0 and self.false_positive_prob == 0.0 and not self.confusion

    def reseeded(self, seed: int) -> "NoiseModel":
        return self.model_copy(update={"seed": seed})
