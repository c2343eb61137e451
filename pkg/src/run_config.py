"""Run configuration document (YAML) carrying every model parameter."""

import hashlib
import json
from pathlib import Path
from typing import Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.config import config
from src.detection.noise import NoiseModel
from src.detection.vlm_client import VlmEndpointConfig
from src.likelihood.params import ScanLikelihoodParams, VisionLikelihoodParams
from src.mcl.estimate import TIE_EPSILON
from src.mcl.hypotheses import DEFAULT_HYPOTHESIS_COUNT
from src.simworld.scan_sim import ScanSimConfig
from src.utils.errors import InvalidArgumentError
from src.visibility.camera import CameraRig
from src.visibility.simulator import OcclusionMode


class VisibilitySection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    occlusion: OcclusionMode = OcclusionMode.NONE


class SamplingSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hypothesis_count: int = Field(default=DEFAULT_HYPOTHESIS_COUNT, ge=1)
    tie_epsilon: float = Field(default=TIE_EPSILON, ge=0.0)


class RuntimeSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    workers: int = Field(default_factory=lambda: config.workers, ge=1)
    chunk_size: int = Field(default_factory=lambda: config.chunk_size, ge=1)
    record_workers: int = Field(default=1, ge=1)


class RunConfig(BaseModel):
    """All parameters of a localization run; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    rig: CameraRig = Field(default_factory=CameraRig.default)
    visibility: VisibilitySection = Field(default_factory=VisibilitySection)
    vision: VisionLikelihoodParams = Field(default_factory=VisionLikelihoodParams)
    scan: ScanLikelihoodParams = Field(default_factory=ScanLikelihoodParams)
    sampling: SamplingSection = Field(default_factory=SamplingSection)
    noise: NoiseModel = Field(default_factory=NoiseModel)
    scan_sim: ScanSimConfig = Field(default_factory=ScanSimConfig)
    vlm: VlmEndpointConfig = Field(default_factory=VlmEndpointConfig)
    runtime: RuntimeSection = Field(default_factory=RuntimeSection)

    @classmethod
    def from_file(cls, path: Optional[Union[str, Path]] = None) -> "RunConfig":
        """
        Load a run configuration (JSON is accepted as YAML).

        Args:
            path: Config file; the shipped defaults when omitted and present

        Returns:
            Validated configuration
        """
        if path is None:
            default = Path(config.default_run_config)
            return cls.from_file(default) if default.exists() else cls()

        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Run config not found: {path}")
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
            return cls.model_validate(raw)
        except (yaml.YAMLError, ValidationError) as e:
            raise InvalidArgumentError(f"Invalid run config {path}: {e}") from e

    def digest(self) -> str:
        """SHA-256 of the parameters that affect results (runtime and endpoint excluded)."""
        payload = self.model_dump(mode="json", by_alias=True, exclude={"runtime", "vlm"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
