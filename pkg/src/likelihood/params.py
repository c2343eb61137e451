"""Likelihood parameters."""

from pydantic import BaseModel, Field


class VisionLikelihoodParams(BaseModel):
    """Sigmoid scale applied to mean-centered consistency scores."""

    alpha: float = Field(default=0.5, gt=0.0)


class ScanLikelihoodParams(BaseModel):
    """Likelihood-field scan model and its fusion temperature."""

    sigma_hit: float = Field(default=0.2, gt=0.0)
    z_rand_weight: float = Field(default=0.05, ge=0.0, lt=1.0)
    fusion_lambda: float = Field(default=1500.0, gt=0.0, alias="lambda")
    max_beams: int = Field(default=180, ge=1)

    model_config = {"populate_by_name": True}
