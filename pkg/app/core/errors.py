"""
Error taxonomy with stable, machine-parsable categories
"""
from typing import ClassVar


class WavCycleError(Exception):
    """Base error; `category` and `exit_code` are stable across releases"""

    category: ClassVar[str] = "internal"
    exit_code: ClassVar[int] = 1


# I/O
class NotFoundError(WavCycleError):
    category = "io.not_found"
    exit_code = 2


class WriteError(WavCycleError):
    category = "io.write"
    exit_code = 2


# Raster formats
class RasterFormatError(WavCycleError):
    """Malformed file header or payload"""

    category = "format.header"
    exit_code = 2

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class DimensionError(WavCycleError):
    category = "format.dimension"
    exit_code = 2


class UnsupportedFormatError(WavCycleError):
    category = "format.unsupported"
    exit_code = 2


class RangeError(WavCycleError):
    category = "raster.range"
    exit_code = 2


# Wavelets
class WaveletLevelError(WavCycleError):
    category = "wavelet.level"
    exit_code = 2


class WaveletStructureError(WavCycleError):
    category = "wavelet.structure"
    exit_code = 2


# Data pipeline
class PipelineSizeError(WavCycleError):
    category = "pipeline.size"
    exit_code = 2


class BandCountError(WavCycleError):
    category = "pipeline.bands"
    exit_code = 2


# Models and flows
class ModelSizeError(WavCycleError):
    category = "model.size"
    exit_code = 2


class ModeError(WavCycleError):
    category = "model.mode"
    exit_code = 2


class LayoutError(WavCycleError):
    category = "tiling.layout"
    exit_code = 2


class CheckpointFormatError(WavCycleError):
    category = "checkpoint.format"
    exit_code = 2


class ConfigError(WavCycleError):
    category = "config.invalid"
    exit_code = 2


class UsageError(WavCycleError):
    category = "usage"
    exit_code = 2


# Numerics
class GradientError(WavCycleError):
    category = "numeric.gradient"
    exit_code = 3


class DivergenceError(WavCycleError):
    category = "numeric.divergence"
    exit_code = 3
