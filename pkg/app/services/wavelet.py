"""
Multilevel separable 2D db3 decomposition, recomposition and subband projection
"""
import warnings

import numpy as np
import pywt

from app.core.errors import WaveletLevelError, WaveletStructureError
from app.domain.models import Orientation, Plane, SubbandSelection, WaveletPyramid

WAVELET = "db3"
# Periodization gives exact half sizes and perfect reconstruction for db3
MODE = "periodization"


def _check_levels(height: int, width: int, levels: int) -> None:
    if levels < 1:
        raise WaveletLevelError(f"level count must be >= 1, got {levels}")
    # Padding may at most double a dimension
    if 2**levels > 2 * max(height, width):
        raise WaveletLevelError(
            f"{levels} levels need a {2**levels}-pixel grid, plane is {width}x{height}"
        )


def padded_size(height: int, width: int, levels: int) -> tuple[int, int]:
    """Dimensions rounded up to the next multiple of 2**levels"""
    step = 2**levels
    return -(-height // step) * step, -(-width // step) * step


def dwt2_multilevel(p: Plane, levels: int) -> WaveletPyramid:
    """
    Decompose a plane into a K-level db3 pyramid

    Non-dyadic planes are reflect-padded up to a multiple of 2**K; the original
    size is recorded so the inverse can crop exactly.

    Args:
        p: Plane (height, width)
        levels: K >= 1

    Returns:
        WaveletPyramid with LL_K and per-level (LH, HL, HH)
    """
    plane = np.asarray(p, dtype=np.float64)
    if plane.ndim != 2:
        raise WaveletStructureError(f"expected a 2-D plane, got shape {plane.shape}")
    height, width = plane.shape
    _check_levels(height, width, levels)

    pad_h, pad_w = padded_size(height, width, levels)
    if (pad_h, pad_w) != (height, width):
        plane = np.pad(plane, ((0, pad_h - height), (0, pad_w - width)), mode="reflect")

    with warnings.catch_warnings():
        # pywt warns when every coefficient sees the periodic boundary; expected here
        warnings.simplefilter("ignore", UserWarning)
        coeffs = pywt.wavedec2(plane, WAVELET, mode=MODE, level=levels)

    # pywt orders (cH, cV, cD): cH is vertical high-pass (LH), cV horizontal high-pass (HL)
    details = [tuple(np.asarray(c) for c in band) for band in reversed(coeffs[1:])]
    return WaveletPyramid(
        levels=levels,
        approx=np.asarray(coeffs[0]),
        details=details,
        original_size=(width, height),
        padded_size=(pad_w, pad_h),
    )


def idwt2_multilevel(pyr: WaveletPyramid) -> Plane:
    """
    Recompose a pyramid and crop to the original size

    Args:
        pyr: Pyramid from dwt2_multilevel (possibly with zeroed subbands)

    Returns:
        Plane of `pyr.original_size`
    """
    if len(pyr.details) != pyr.levels:
        raise WaveletStructureError(f"pyramid declares {pyr.levels} levels, has {len(pyr.details)}")
    pad_w, pad_h = pyr.padded_size
    step = 2**pyr.levels
    if pyr.approx.shape != (pad_h // step, pad_w // step):
        raise WaveletStructureError(
            f"LL_{pyr.levels} has shape {pyr.approx.shape}, expected {(pad_h // step, pad_w // step)}"
        )
    for level, bands in enumerate(pyr.details, start=1):
        expected = (pad_h >> level, pad_w >> level)
        for band in bands:
            if band.shape != expected:
                raise WaveletStructureError(f"level {level} subband has shape {band.shape}, expected {expected}")

    coeffs = [pyr.approx] + [tuple(band) for band in reversed(pyr.details)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        plane = pywt.waverec2(coeffs, WAVELET, mode=MODE)
    width, height = pyr.original_size
    return np.ascontiguousarray(plane[:height, :width])


def zero_unselected(pyr: WaveletPyramid, sel: SubbandSelection) -> WaveletPyramid:
    """Copy of `pyr` with every subband outside `sel` set to zero"""
    sel.validate(pyr.levels)

    def keep(plane: Plane, level: int, orientation: Orientation) -> Plane:
        return plane if (level, orientation) in sel else np.zeros_like(plane)

    details = [
        (
            keep(lh, level, Orientation.LH),
            keep(hl, level, Orientation.HL),
            keep(hh, level, Orientation.HH),
        )
        for level, (lh, hl, hh) in enumerate(pyr.details, start=1)
    ]
    return WaveletPyramid(
        levels=pyr.levels,
        approx=keep(pyr.approx, pyr.levels, Orientation.LL),
        details=details,
        original_size=pyr.original_size,
        padded_size=pyr.padded_size,
    )


def subband_project(p: Plane, levels: int, sel: SubbandSelection) -> Plane:
    """
    Build the wavelet subband image: recompose only the selected subbands

    Args:
        p: Plane
        levels: Decomposition depth K
        sel: Subbands to keep

    Returns:
        Plane of the same size as `p`
    """
    return idwt2_multilevel(zero_unselected(dwt2_multilevel(p, levels), sel))


def subband_energies(pyr: WaveletPyramid) -> dict[tuple[int, Orientation], float]:
    """Sum of squared coefficients per subband"""
    energies = {(pyr.levels, Orientation.LL): float(np.sum(pyr.approx**2))}
    for level, (lh, hl, hh) in enumerate(pyr.details, start=1):
        energies[(level, Orientation.LH)] = float(np.sum(lh**2))
        energies[(level, Orientation.HL)] = float(np.sum(hl**2))
        energies[(level, Orientation.HH)] = float(np.sum(hh**2))
    return energies
