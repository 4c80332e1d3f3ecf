"""
Network architecture schemas
"""
from pydantic import BaseModel, ConfigDict, Field


class GeneratorConfig(BaseModel):
    """Tight-frame U-Net generator with a global residual skip"""
    model_config = ConfigDict(extra="forbid")

    in_channels: int = Field(1, ge=1, description="1 for stripe, 4 for wave (RGBN)")
    depth: int = Field(4, ge=1, description="Number of Haar pooling levels")
    base_width: int = Field(64, ge=1, description="Channels at level 1, doubled per level")
    max_width: int = Field(512, ge=1)
    norm_eps: float = Field(1e-5, gt=0)

    def width_at(self, level: int) -> int:
        """Channel count at encoder level `level` (0 = full resolution)"""
        return min(self.base_width * 2**level, self.max_width)


class DiscriminatorConfig(BaseModel):
    """Five-convolution patch discriminator followed by a fully connected layer"""
    model_config = ConfigDict(extra="forbid")

    in_channels: int = Field(1, ge=1)
    base_width: int = Field(64, ge=1, description="Width of the first conv; later convs use 2x, 4x, 8x, 8x")
    kernel_size: int = Field(4, ge=2)
    leaky_slope: float = Field(0.2, ge=0)
    norm_eps: float = Field(1e-5, gt=0)
    min_input: int = Field(32, ge=1, description="Smallest accepted patch height/width")

    @property
    def widths(self) -> list[int]:
        b = self.base_width
        return [b, 2 * b, 4 * b, 8 * b, 8 * b]

    @property
    def strides(self) -> list[int]:
        return [2, 2, 2, 1, 1]
