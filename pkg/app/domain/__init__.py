"""Domain module - core types shared by all services"""
from app.domain.models import (
    DEFAULT_RANGE,
    GREEN_BAND,
    Checkpoint,
    DomainKind,
    DomainStore,
    Manifest,
    ManifestEntry,
    MultiBandRaster,
    NoiseMode,
    Orientation,
    Plane,
    RasterFormat,
    SubbandSelection,
    TileLayout,
    WaveletPyramid,
)

__all__ = [
    "DEFAULT_RANGE",
    "GREEN_BAND",
    "Plane",
    # Enums
    "NoiseMode",
    "DomainKind",
    "Orientation",
    "RasterFormat",
    # Types
    "MultiBandRaster",
    "WaveletPyramid",
    "SubbandSelection",
    "DomainStore",
    "TileLayout",
    "Checkpoint",
    "ManifestEntry",
    "Manifest",
]
