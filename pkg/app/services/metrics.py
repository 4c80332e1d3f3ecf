"""
PSNR and SSIM image quality metrics
"""
import math
from typing import Optional

import numpy as np
from skimage.metrics import mean_squared_error, peak_signal_noise_ratio, structural_similarity

from app.core.errors import DimensionError, PipelineSizeError
from app.domain.models import Plane
from app.schemas.evaluation import SsimConfig

DEFAULT_PEAK = 65535.0


def _pair(a: Plane, b: Plane) -> tuple[np.ndarray, np.ndarray]:
    a64 = np.asarray(a, dtype=np.float64)
    b64 = np.asarray(b, dtype=np.float64)
    if a64.shape != b64.shape:
        raise DimensionError(f"metric inputs differ in shape: {a64.shape} vs {b64.shape}")
    return a64, b64


def psnr(a: Plane, b: Plane, peak: float = DEFAULT_PEAK) -> float:
    """
    Peak signal-to-noise ratio in dB

    Args:
        a: Reference plane
        b: Test plane
        peak: Peak signal value L

    Returns:
        10 log10(L^2 / MSE), or math.inf when the planes are identical
    """
    if peak <= 0:
        raise DimensionError(f"peak must be positive, got {peak}")
    a64, b64 = _pair(a, b)
    if mean_squared_error(a64, b64) == 0.0:
        return math.inf
    return float(peak_signal_noise_ratio(a64, b64, data_range=peak))


def ssim(a: Plane, b: Plane, cfg: Optional[SsimConfig] = None) -> float:
    """
    Mean structural similarity over a Gaussian-weighted local window

    The full SSIM map is averaged, borders included.

    Args:
        a: Reference plane
        b: Test plane
        cfg: Window and stabilizing constants

    Returns:
        Score in [-1, 1]; exactly 1.0 for identical inputs
    """
    cfg = cfg or SsimConfig()
    a64, b64 = _pair(a, b)
    if a64.ndim != 2 or min(a64.shape) < cfg.window:
        raise PipelineSizeError(f"ssim needs planes of at least {cfg.window}x{cfg.window}, got {a64.shape}")

    _, ssim_map = structural_similarity(
        a64,
        b64,
        data_range=cfg.dynamic_range,
        gaussian_weights=True,
        sigma=cfg.sigma,
        use_sample_covariance=False,
        K1=cfg.k1,
        K2=cfg.k2,
        full=True,
    )
    return float(np.mean(ssim_map))
