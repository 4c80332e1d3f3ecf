"""
Synthetic noise parameter schemas
"""
from pydantic import BaseModel, ConfigDict, Field, field_validator


class StripeNoiseParams(BaseModel):
    """Column-correlated vertical stripe noise"""
    model_config = ConfigDict(extra="forbid")

    sigma: float = Field(1300.0, ge=0, description="Stripe amplitude (DN), ~2% of range")
    corr_len: int = Field(1, ge=1, description="Moving-average width across columns (pixels)")
    drift: float = Field(0.0, ge=0, le=1, description="Max relative vertical amplitude modulation")
    seed: int = Field(0, ge=0, lt=2**64)


class WaveNoiseParams(BaseModel):
    """Horizontal banding with per-column phase wander"""
    model_config = ConfigDict(extra="forbid")

    amplitude: float = Field(650.0, ge=0, description="Amplitude per sinusoid (DN)")
    periods: list[float] = Field(default_factory=lambda: [16.0, 40.0], min_length=1)
    phase_jitter: float = Field(0.02, ge=0, description="Phase random-walk step std (rad/column)")
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("periods")
    @classmethod
    def periods_resolvable(cls, value: list[float]) -> list[float]:
        if any(period < 2 for period in value):
            raise ValueError("every period must be >= 2 pixels")
        return value
