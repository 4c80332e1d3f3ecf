"""
Domain types for wavelet-subband denoising
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum as PyEnum
from pathlib import Path

import numpy as np

from app.core.errors import DimensionError, LayoutError, WaveletStructureError

# A single spectral-band image, row-major (height, width)
Plane = np.ndarray

DEFAULT_RANGE: tuple[float, float] = (0.0, 65535.0)
GREEN_BAND = 1


class NoiseMode(str, PyEnum):
    """Structured noise family handled by a model"""
    STRIPE = "stripe"
    WAVE = "wave"


class DomainKind(str, PyEnum):
    """Unpaired training domain"""
    CLEAN = "clean"
    NOISY = "noisy"


class Orientation(str, PyEnum):
    """Subband orientation; HL is high-pass horizontally (vertical detail)"""
    LL = "LL"
    LH = "LH"
    HL = "HL"
    HH = "HH"


class RasterFormat(str, PyEnum):
    """On-disk raster encodings"""
    WCR = "wcr"
    PGM16 = "pgm16"


@dataclass
class MultiBandRaster:
    """Band-sequential float32 raster with a declared valid range"""

    samples: np.ndarray
    range: tuple[float, float] = DEFAULT_RANGE

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float32)
        if self.samples.ndim == 2:
            self.samples = self.samples[np.newaxis]
        if self.samples.ndim != 3:
            raise DimensionError(f"raster samples must be (bands, height, width), got {self.samples.shape}")
        bands, height, width = self.samples.shape
        if width < 1 or height < 1:
            raise DimensionError(f"raster dimensions must be positive, got {width}x{height}")
        if bands not in (1, 3, 4):
            raise DimensionError(f"band count must be 1, 3 or 4, got {bands}")
        lo, hi = self.range
        if lo > hi:
            raise DimensionError(f"invalid range ({lo}, {hi})")
        self.range = (float(lo), float(hi))

    @property
    def bands(self) -> int:
        return int(self.samples.shape[0])

    @property
    def height(self) -> int:
        return int(self.samples.shape[1])

    @property
    def width(self) -> int:
        return int(self.samples.shape[2])

    def band(self, index: int) -> Plane:
        """Return one band as a plane view"""
        if not 0 <= index < self.bands:
            raise DimensionError(f"band {index} out of range for {self.bands}-band raster")
        return self.samples[index]

    def copy(self) -> MultiBandRaster:
        return MultiBandRaster(self.samples.copy(), self.range)


@dataclass
class WaveletPyramid:
    """
    K-level decomposition of one plane

    `details[i - 1]` holds the (LH_i, HL_i, HH_i) planes of level i.
    """

    levels: int
    approx: Plane
    details: list[tuple[Plane, Plane, Plane]]
    original_size: tuple[int, int]
    padded_size: tuple[int, int]

    def band(self, level: int, orientation: Orientation) -> Plane:
        if orientation is Orientation.LL:
            if level != self.levels:
                raise WaveletStructureError(f"LL exists only at level {self.levels}")
            return self.approx
        lh, hl, hh = self.details[level - 1]
        return {Orientation.LH: lh, Orientation.HL: hl, Orientation.HH: hh}[orientation]


_SELECTION_TERM = re.compile(r"^(LL|LH|HL|HH):(\d+)(?:-(\d+))?$")


@dataclass(frozen=True)
class SubbandSelection:
    """Set of (level, orientation) subbands kept during recomposition"""

    kept: frozenset[tuple[int, Orientation]] = field(default_factory=frozenset)

    @classmethod
    def parse(cls, text: str) -> SubbandSelection:
        """
        Parse a selection string such as "HL:1-9", "LH:1-6" or "HL:1-9,LL:9"

        Args:
            text: Comma separated `ORIENTATION:LEVEL[-LEVEL]` terms

        Returns:
            Parsed selection
        """
        kept: set[tuple[int, Orientation]] = set()
        for raw in text.split(","):
            term = raw.strip().upper()
            if not term:
                continue
            match = _SELECTION_TERM.match(term)
            if match is None:
                raise WaveletStructureError(f"invalid subband selection term '{raw.strip()}'")
            orientation = Orientation(match.group(1))
            first = int(match.group(2))
            last = int(match.group(3) or first)
            if first < 1 or last < first:
                raise WaveletStructureError(f"invalid level range in '{raw.strip()}'")
            kept.update((level, orientation) for level in range(first, last + 1))
        return cls(frozenset(kept))

    @classmethod
    def full(cls, levels: int) -> SubbandSelection:
        """Every subband of a `levels`-deep pyramid"""
        kept = {(level, o) for level in range(1, levels + 1) for o in (Orientation.LH, Orientation.HL, Orientation.HH)}
        kept.add((levels, Orientation.LL))
        return cls(frozenset(kept))

    def complement(self, levels: int) -> SubbandSelection:
        return SubbandSelection(SubbandSelection.full(levels).kept - self.kept)

    def union(self, other: SubbandSelection) -> SubbandSelection:
        return SubbandSelection(self.kept | other.kept)

    def validate(self, levels: int) -> None:
        for level, orientation in self.kept:
            if not 1 <= level <= levels:
                raise WaveletStructureError(f"subband level {level} outside 1..{levels}")
            if orientation is Orientation.LL and level != levels:
                raise WaveletStructureError(f"LL may only be kept at level {levels}, got {level}")

    def __contains__(self, item: object) -> bool:
        return item in self.kept

    def __str__(self) -> str:
        terms = sorted(self.kept, key=lambda t: (t[1].value, t[0]))
        return ",".join(f"{o.value}:{level}" for level, o in terms)


@dataclass
class DomainStore:
    """Immutable collection of subband items for one unpaired domain"""

    domain: DomainKind
    mode: NoiseMode
    items: list[np.ndarray]
    provenance: list[str]

    def __post_init__(self) -> None:
        if len(self.items) != len(self.provenance):
            raise DimensionError("every store item needs one provenance entry")
        for item in self.items:
            item.setflags(write=False)

    @property
    def channels(self) -> int:
        return int(self.items[0].shape[0]) if self.items else 0

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class TileLayout:
    """
    Overlapping tile grid whose centered cores partition the scene

    A tile of size `tile` is placed every `stride` pixels; only its central
    `stride`-sized core is kept. `stride == tile` disables overlap on that axis.
    """

    tile_h: int = 128
    tile_w: int = 128
    stride_h: int = 64
    stride_w: int = 64

    def __post_init__(self) -> None:
        for tile, stride in ((self.tile_h, self.stride_h), (self.tile_w, self.stride_w)):
            if stride < 1 or stride > tile or (tile - stride) % 2:
                raise LayoutError(f"stride {stride} incompatible with tile {tile}")

    @property
    def margin_h(self) -> int:
        return (self.tile_h - self.stride_h) // 2

    @property
    def margin_w(self) -> int:
        return (self.tile_w - self.stride_w) // 2

    def grid(self, height: int, width: int) -> tuple[int, int]:
        """Number of tile rows and columns needed to cover a scene"""
        return -(-height // self.stride_h), -(-width // self.stride_w)


@dataclass
class Checkpoint:
    """
    Named float32 tensors plus the JSON config echo

    `history` is the in-memory loss record of the run that produced it; it is
    persisted separately as CSV.
    """

    tensors: dict[str, np.ndarray]
    config: dict
    history: list[dict[str, float]] = field(default_factory=list)

    def subset(self, prefix: str) -> dict[str, np.ndarray]:
        """Tensors under `prefix.` with the prefix stripped"""
        head = f"{prefix}."
        return {name[len(head):]: value for name, value in self.tensors.items() if name.startswith(head)}


@dataclass(frozen=True)
class ManifestEntry:
    """One raster listed in a dataset manifest"""

    path: Path
    domain: DomainKind
    mode: NoiseMode


@dataclass
class Manifest:
    """Tagged raster list plus free-form `# key: value` header fields"""

    entries: list[ManifestEntry] = field(default_factory=list)
    header: dict[str, str] = field(default_factory=dict)

    def select(self, domain: DomainKind, mode: NoiseMode | None = None) -> list[ManifestEntry]:
        return [e for e in self.entries if e.domain is domain and (mode is None or e.mode is mode)]
