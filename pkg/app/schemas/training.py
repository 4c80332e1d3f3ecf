"""
Training and patch sampling schemas
"""
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.errors import WaveletStructureError
from app.domain.models import NoiseMode, SubbandSelection
from app.schemas.network import DiscriminatorConfig, GeneratorConfig

STRIPE_DEFAULTS = {"levels": 9, "selection": "HL:1-9", "patch": (2048, 32)}
WAVE_DEFAULTS = {"levels": 6, "selection": "LH:1-6", "patch": (128, 128)}


class PatchSpec(BaseModel):
    """Random crop geometry and flip augmentation"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: NoiseMode = NoiseMode.STRIPE
    patch_width: int = Field(2048, ge=1)
    patch_height: int = Field(32, ge=1)
    flip_horizontal: bool = True
    flip_vertical: bool = True


class TrainConfig(BaseModel):
    """
    Flat training configuration

    Field names are the keys of the JSON config file; the cycle weight is
    spelled `lambda` in files.
    """
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    mode: NoiseMode = NoiseMode.STRIPE

    # Objective
    lambda_cycle: float = Field(10.0, ge=0, alias="lambda")
    gamma: float = Field(5.0, ge=0)

    # Schedule
    epochs: int = Field(200, ge=1)
    decay_start_epoch: int = Field(100, ge=0, description="Last epoch at the constant rate")
    lr0: float = Field(2e-3, gt=0)
    iters_per_epoch: Optional[int] = Field(None, ge=1, description="Defaults to noisy-store crop capacity")
    batch_size: int = Field(1, ge=1)

    # Adam
    beta1: float = Field(0.5, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    adam_eps: float = Field(1e-8, gt=0)

    seed: int = Field(0, ge=0)
    log_every: int = Field(50, ge=1)

    # Data
    patch_width: Optional[int] = Field(None, ge=1)
    patch_height: Optional[int] = Field(None, ge=1)
    flip_horizontal: bool = True
    flip_vertical: bool = True
    train_split: Literal["top", "all"] = "top"
    wavelet_levels: Optional[int] = Field(None, ge=1)
    selection: Optional[str] = None
    downsample_factor: int = Field(32, ge=1)
    sample_scale: float = Field(1000.0, gt=0, description="DN per network unit")
    use_subbands: bool = True
    wave_channels: Literal["rgbn", "green"] = "rgbn"

    # Networks
    gen_depth: int = Field(4, ge=1)
    gen_base_width: int = Field(64, ge=1)
    gen_max_width: int = Field(512, ge=1)
    disc_base_width: int = Field(64, ge=1)

    @model_validator(mode="after")
    def selection_parses(self) -> "TrainConfig":
        try:
            self.subband_selection().validate(self.levels)
        except WaveletStructureError as e:
            raise ValueError(str(e)) from e
        return self

    def mode_defaults(self) -> dict:
        return STRIPE_DEFAULTS if self.mode is NoiseMode.STRIPE else WAVE_DEFAULTS

    @property
    def levels(self) -> int:
        return self.wavelet_levels or self.mode_defaults()["levels"]

    @property
    def in_channels(self) -> int:
        if self.mode is NoiseMode.WAVE and self.wave_channels == "rgbn":
            return 4
        return 1

    def subband_selection(self) -> SubbandSelection:
        return SubbandSelection.parse(self.selection or self.mode_defaults()["selection"])

    def patch_spec(self) -> PatchSpec:
        default_w, default_h = self.mode_defaults()["patch"]
        return PatchSpec(
            mode=self.mode,
            patch_width=self.patch_width or default_w,
            patch_height=self.patch_height or default_h,
            flip_horizontal=self.flip_horizontal,
            flip_vertical=self.flip_vertical,
        )

    def generator_config(self) -> GeneratorConfig:
        return GeneratorConfig(
            in_channels=self.in_channels,
            depth=self.gen_depth,
            base_width=self.gen_base_width,
            max_width=self.gen_max_width,
        )

    def discriminator_config(self) -> DiscriminatorConfig:
        return DiscriminatorConfig(in_channels=self.in_channels, base_width=self.disc_base_width)

    def to_file_dict(self) -> dict:
        """JSON-ready dict using file key spellings"""
        return self.model_dump(mode="json", by_alias=True)
