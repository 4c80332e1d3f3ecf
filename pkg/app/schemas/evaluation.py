"""
Evaluation and inference schemas
"""
from pydantic import BaseModel, ConfigDict, Field


class SsimConfig(BaseModel):
    """Canonical SSIM constants"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    window: int = Field(11, ge=3, description="Gaussian window side (odd)")
    sigma: float = Field(1.5, gt=0)
    k1: float = Field(0.01, gt=0)
    k2: float = Field(0.03, gt=0)
    dynamic_range: float = Field(65535.0, gt=0)


class InferenceConfig(BaseModel):
    """Scene reconstruction options"""
    model_config = ConfigDict(extra="forbid")

    tile_size: int = Field(128, ge=2, description="Wave-mode square tile side")
    stripe_window: int | None = Field(
        None, ge=2, description="Stripe-mode window width; defaults to the training patch width"
    )
    whole_scene: bool = Field(False, description="Stripe mode: run the generator on the full strip")
    clip: bool = True
    threads: int = Field(1, ge=1)
