"""
Unit tests for WCR/PGM16 raster I/O
"""
import struct
from pathlib import Path

import numpy as np
import pytest

from app.core.errors import (
    DimensionError,
    NotFoundError,
    RangeError,
    RasterFormatError,
    UnsupportedFormatError,
)
from app.domain.models import MultiBandRaster, RasterFormat
from app.services.raster_io import (
    clip_to_range,
    decode_pgm,
    decode_wcr,
    encode_pgm16,
    encode_wcr,
    read_raster,
    write_raster,
)


def test_wcr_round_trip_is_bit_exact(workdir: Path, rng: np.random.Generator):
    """Test WCR preserves every float32 bit, including out-of-range values"""
    samples = rng.normal(30000, 40000, size=(4, 7, 5)).astype(np.float32)
    samples[0, 0, 0] = -1.5
    raster = MultiBandRaster(samples)

    write_raster(raster, workdir / "scene.wcr")
    result = read_raster(workdir / "scene.wcr")

    assert result.samples.tobytes() == samples.tobytes()
    assert (result.bands, result.height, result.width) == (4, 7, 5)


def test_wcr_header_layout():
    """Test header is magic plus four little-endian u32 fields"""
    data = encode_wcr(MultiBandRaster(np.zeros((1, 2, 3), np.float32)))

    assert data[:4] == b"WCR1"
    assert struct.unpack("<4I", data[4:20]) == (3, 2, 1, 0)
    assert len(data) == 20 + 4 * 6


def test_wcr_bad_magic_reports_offset_zero():
    """Test corrupt magic raises a header error at byte 0"""
    data = b"XXXX" + encode_wcr(MultiBandRaster(np.zeros((1, 2, 2), np.float32)))[4:]

    with pytest.raises(RasterFormatError) as excinfo:
        decode_wcr(data)

    assert excinfo.value.offset == 0
    assert excinfo.value.category == "format.header"


def test_wcr_truncated_payload_is_dimension_error():
    """Test a payload shorter than the header declares is rejected"""
    data = encode_wcr(MultiBandRaster(np.zeros((1, 4, 4), np.float32)))

    with pytest.raises(DimensionError):
        decode_wcr(data[:-4])


def test_wcr_nonzero_reserved_field():
    """Test the reserved field must be zero"""
    data = bytearray(encode_wcr(MultiBandRaster(np.zeros((1, 2, 2), np.float32))))
    data[16] = 1

    with pytest.raises(RasterFormatError) as excinfo:
        decode_wcr(bytes(data))

    assert excinfo.value.offset == 16


def test_pgm16_round_trip_of_integers(workdir: Path, rng: np.random.Generator):
    """Test integer-valued planes survive PGM16 exactly"""
    plane = rng.integers(0, 65536, size=(1, 9, 13)).astype(np.float32)

    write_raster(MultiBandRaster(plane), workdir / "plane.pgm")
    result = read_raster(workdir / "plane.pgm")

    np.testing.assert_array_equal(result.samples, plane)


def test_pgm16_is_big_endian_with_maxval_65535():
    """Test the on-disk PGM16 sample order"""
    data = encode_pgm16(MultiBandRaster(np.array([[[258.0]]], np.float32)))

    assert data.startswith(b"P5\n1 1\n65535\n")
    assert data[-2:] == b"\x01\x02"


def test_pgm16_rounds_to_nearest():
    """Test non-integer samples are rounded on write"""
    data = encode_pgm16(MultiBandRaster(np.array([[[1.4, 1.6]]], np.float32)))

    assert decode_pgm(data).samples[0, 0].tolist() == [1.0, 2.0]


def test_pgm16_rejects_out_of_range():
    """Test values outside [0, 65535] raise a range error"""
    with pytest.raises(RangeError):
        encode_pgm16(MultiBandRaster(np.array([[[-3.0]]], np.float32)))


def test_pgm16_rejects_multiband():
    """Test PGM cannot hold more than one band"""
    with pytest.raises(UnsupportedFormatError):
        encode_pgm16(MultiBandRaster(np.zeros((4, 2, 2), np.float32)))


def test_pgm_reads_8bit_and_comments():
    """Test maxval < 256 uses one byte per sample and comments are skipped"""
    data = b"P5\n# made by hand\n2 1\n255\n" + bytes([7, 200])

    assert decode_pgm(data).samples[0, 0].tolist() == [7.0, 200.0]


def test_pgm_maxval_zero_is_header_error():
    """Test maxval outside 1..65535 is rejected"""
    with pytest.raises(RasterFormatError):
        decode_pgm(b"P5\n1 1\n0\n\x00")


def test_read_missing_file(workdir: Path):
    """Test a missing path raises io.not_found"""
    with pytest.raises(NotFoundError) as excinfo:
        read_raster(workdir / "absent.wcr")

    assert excinfo.value.category == "io.not_found"


def test_unknown_signature(workdir: Path):
    """Test files that are neither WCR nor PGM are rejected"""
    (workdir / "junk.bin").write_bytes(b"GIF89a....")

    with pytest.raises(RasterFormatError):
        read_raster(workdir / "junk.bin")


def test_write_format_override(workdir: Path):
    """Test an explicit format wins over the suffix"""
    raster = MultiBandRaster(np.full((1, 2, 2), 5.0, np.float32))

    write_raster(raster, workdir / "plane.pgm", format=RasterFormat.WCR)

    assert (workdir / "plane.pgm").read_bytes()[:4] == b"WCR1"


def test_clip_to_range():
    """Test clipping clamps to the declared interval and leaves inliers alone"""
    raster = MultiBandRaster(np.array([[[-5.0, 10.0, 70000.0]]], np.float32), (0.0, 65535.0))

    clipped = clip_to_range(raster)

    assert clipped.samples[0, 0].tolist() == [0.0, 10.0, 65535.0]
    assert raster.samples[0, 0, 0] == -5.0


def test_band_count_must_be_1_3_or_4():
    """Test two-band rasters are not representable"""
    with pytest.raises(DimensionError):
        MultiBandRaster(np.zeros((2, 3, 3), np.float32))
