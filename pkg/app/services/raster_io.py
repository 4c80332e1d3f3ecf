"""
Bit-exact raster I/O (native WCR float rasters and 16-bit binary PGM)
"""
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from app.core.errors import (
    DimensionError,
    RangeError,
    RasterFormatError,
    UnsupportedFormatError,
)
from app.core.logging import get_logger
from app.domain.models import DEFAULT_RANGE, MultiBandRaster, RasterFormat
from app.repositories.base import atomic_write_bytes, read_bytes

logger = get_logger(__name__)

WCR_MAGIC = b"WCR1"
WCR_HEADER = struct.Struct("<4s4I")
PGM_MAX = 65535


def encode_wcr(raster: MultiBandRaster) -> bytes:
    """
    Encode a raster as WCR: magic, u32 width/height/bands/reserved, f32 LE payload

    Args:
        raster: Raster to encode

    Returns:
        File contents
    """
    header = WCR_HEADER.pack(WCR_MAGIC, raster.width, raster.height, raster.bands, 0)
    return header + np.ascontiguousarray(raster.samples, dtype="<f4").tobytes()


def decode_wcr(data: bytes, value_range: tuple[float, float] = DEFAULT_RANGE) -> MultiBandRaster:
    """
    Decode WCR file contents without clipping

    Args:
        data: File contents
        value_range: Declared valid interval attached to the result

    Returns:
        Decoded raster
    """
    if len(data) < WCR_HEADER.size:
        raise RasterFormatError("truncated WCR header", offset=len(data))
    magic, width, height, bands, reserved = WCR_HEADER.unpack_from(data, 0)
    if magic != WCR_MAGIC:
        raise RasterFormatError(f"bad WCR magic {magic!r}", offset=0)
    if reserved != 0:
        raise RasterFormatError(f"reserved field must be 0, got {reserved}", offset=16)
    if width < 1 or height < 1 or bands not in (1, 3, 4):
        raise DimensionError(f"invalid WCR dimensions {width}x{height}x{bands}")

    count = width * height * bands
    payload = len(data) - WCR_HEADER.size
    if payload != 4 * count:
        raise DimensionError(f"WCR payload has {payload} bytes, expected {4 * count}")
    samples = np.frombuffer(data, dtype="<f4", count=count, offset=WCR_HEADER.size)
    return MultiBandRaster(samples.reshape(bands, height, width).astype(np.float32), value_range)


def _pgm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited header token, skipping '#' comments"""
    n = len(data)
    while pos < n:
        if data[pos : pos + 1].isspace():
            pos += 1
        elif data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise RasterFormatError("truncated PGM header", offset=pos)
    return data[start:pos], pos


def decode_pgm(data: bytes, value_range: tuple[float, float] = DEFAULT_RANGE) -> MultiBandRaster:
    """
    Decode a binary (P5) PGM; samples wider than 8 bits are big-endian

    Args:
        data: File contents
        value_range: Declared valid interval attached to the result

    Returns:
        Single-band raster
    """
    magic, pos = _pgm_token(data, 0)
    if magic != b"P5":
        raise RasterFormatError(f"bad PGM magic {magic!r}", offset=0)
    fields = []
    for name in ("width", "height", "maxval"):
        start = pos
        token, pos = _pgm_token(data, pos)
        if not token.isdigit():
            raise RasterFormatError(f"PGM {name} is not an integer: {token!r}", offset=start)
        fields.append(int(token))
    width, height, maxval = fields
    if not 1 <= maxval <= PGM_MAX:
        raise RasterFormatError(f"PGM maxval {maxval} outside 1..{PGM_MAX}", offset=pos)
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise RasterFormatError("missing whitespace after PGM header", offset=pos)
    pos += 1
    if width < 1 or height < 1:
        raise DimensionError(f"invalid PGM dimensions {width}x{height}")

    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    expected = width * height * dtype.itemsize
    if len(data) - pos != expected:
        raise DimensionError(f"PGM payload has {len(data) - pos} bytes, expected {expected}")
    samples = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos)
    return MultiBandRaster(samples.reshape(1, height, width).astype(np.float32), value_range)


def encode_pgm16(raster: MultiBandRaster) -> bytes:
    """
    Encode a single-band raster as P5 PGM with maxval 65535

    Samples are rounded to the nearest integer; out-of-range samples must be
    clipped by the caller.

    Args:
        raster: Single-band raster

    Returns:
        File contents
    """
    if raster.bands != 1:
        raise UnsupportedFormatError(f"PGM16 holds one band, raster has {raster.bands}")
    values = np.rint(raster.samples[0].astype(np.float64))
    if not np.all(np.isfinite(values)) or values.min() < 0 or values.max() > PGM_MAX:
        raise RangeError(
            f"PGM16 samples must lie in [0, {PGM_MAX}], got [{raster.samples.min()}, {raster.samples.max()}]"
        )
    header = f"P5\n{raster.width} {raster.height}\n{PGM_MAX}\n".encode("ascii")
    return header + values.astype(">u2").tobytes()


def format_for_path(path: Path) -> RasterFormat:
    return RasterFormat.PGM16 if Path(path).suffix.lower() == ".pgm" else RasterFormat.WCR


def read_raster(path: Path, value_range: tuple[float, float] = DEFAULT_RANGE) -> MultiBandRaster:
    """
    Read a WCR or PGM raster with exact stored values (no clipping)

    Args:
        path: Raster file
        value_range: Declared valid interval

    Returns:
        Raster
    """
    data = read_bytes(Path(path))
    if data[:4] == WCR_MAGIC:
        raster = decode_wcr(data, value_range)
    elif data[:2] == b"P5":
        raster = decode_pgm(data, value_range)
    else:
        raise RasterFormatError(f"unknown raster signature {data[:4]!r}", offset=0)
    logger.debug("raster_read", path=str(path), width=raster.width, height=raster.height, bands=raster.bands)
    return raster


def write_raster(
    raster: MultiBandRaster,
    path: Path,
    format: Optional[RasterFormat] = None,
) -> None:
    """
    Write a raster atomically

    Args:
        raster: Raster to write
        path: Destination
        format: Encoding; inferred from the suffix when omitted (.pgm -> PGM16)
    """
    fmt = RasterFormat(format) if format is not None else format_for_path(path)
    data = encode_pgm16(raster) if fmt is RasterFormat.PGM16 else encode_wcr(raster)
    atomic_write_bytes(Path(path), data)
    logger.debug("raster_written", path=str(path), format=fmt.value, bands=raster.bands)


def clip_to_range(raster: MultiBandRaster) -> MultiBandRaster:
    """
    Clamp every sample into the declared range

    Args:
        raster: Input raster

    Returns:
        New raster with samples in [lo, hi]
    """
    lo, hi = raster.range
    return MultiBandRaster(np.clip(raster.samples, lo, hi), raster.range)
