"""
Parametric structured-noise generators and synthetic clean/noisy pairs
"""
import numpy as np
from scipy import ndimage

from app.core.errors import DimensionError
from app.core.logging import get_logger
from app.domain.models import DEFAULT_RANGE, MultiBandRaster, Plane
from app.schemas.noise import StripeNoiseParams, WaveNoiseParams
from app.services.raster_io import clip_to_range

logger = get_logger(__name__)


def _check_dims(width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise DimensionError(f"noise plane dimensions must be positive, got {width}x{height}")


def smooth_profile(rng: np.random.Generator, length: int, scale: float) -> np.ndarray:
    """Smooth random profile normalized into [-1, 1]"""
    raw = ndimage.gaussian_filter1d(rng.standard_normal(length), sigma=max(scale, 1.0), mode="wrap")
    peak = np.max(np.abs(raw))
    return raw / peak if peak > 0 else raw


def gen_stripe_noise(width: int, height: int, p: StripeNoiseParams) -> Plane:
    """
    Vertical stripe noise n(i, j) = m(i) * c(j)

    c holds one Gaussian(0, sigma^2) offset per column smoothed by a circular
    moving average of width `corr_len`; m(i) = 1 + drift * s(i) with s a smooth
    profile in [-1, 1].

    Args:
        width: Plane width
        height: Plane height
        p: Stripe parameters

    Returns:
        Noise plane (height, width), float64
    """
    _check_dims(width, height)
    rng = np.random.default_rng(p.seed)
    columns = rng.normal(0.0, p.sigma, size=width)
    if p.corr_len > 1:
        columns = ndimage.uniform_filter1d(columns, size=p.corr_len, mode="wrap")
    profile = smooth_profile(rng, height, height / 8)
    modulation = 1.0 + p.drift * profile if p.drift > 0 else np.ones(height)
    return modulation[:, np.newaxis] * columns[np.newaxis, :]


def gen_wave_noise(width: int, height: int, p: WaveNoiseParams) -> Plane:
    """
    Horizontal wave noise n(i, j) = A * sum_k sin(2*pi*i/T_k + phi_k(j))

    Each phi_k is a random walk across columns with step std `phase_jitter`
    starting from a uniform random phase.

    Args:
        width: Plane width
        height: Plane height
        p: Wave parameters

    Returns:
        Noise plane (height, width), float64
    """
    _check_dims(width, height)
    rng = np.random.default_rng(p.seed)
    rows = np.arange(height, dtype=np.float64)[:, np.newaxis]
    noise = np.zeros((height, width))
    for period in p.periods:
        start = rng.uniform(0.0, 2.0 * np.pi)
        steps = rng.normal(0.0, p.phase_jitter, size=width)
        steps[0] = 0.0
        phase = start + np.cumsum(steps)
        noise += np.sin(2.0 * np.pi * rows / period + phase[np.newaxis, :])
    return p.amplitude * noise


def gen_clean_scene(
    width: int,
    height: int,
    bands: int,
    seed: int,
    value_range: tuple[float, float] = DEFAULT_RANGE,
) -> MultiBandRaster:
    """
    Smooth multi-band texture standing in for a relatively clean scene

    A shared multi-scale texture plus per-band gains keeps bands spatially
    correlated the way registered RGBN bands are.

    Args:
        width: Scene width
        height: Scene height
        bands: Band count (1, 3 or 4)
        seed: Generator seed
        value_range: Declared valid interval

    Returns:
        Raster with samples inside the middle of the range
    """
    _check_dims(width, height)
    rng = np.random.default_rng(seed)
    lo, hi = value_range
    span = hi - lo

    texture = np.zeros((height, width))
    for sigma, weight in ((16.0, 1.0), (4.0, 0.5), (1.0, 0.15)):
        layer = ndimage.gaussian_filter(rng.standard_normal((height, width)), sigma=sigma, mode="wrap")
        std = layer.std()
        texture += weight * (layer / std if std > 0 else layer)
    texture /= max(np.abs(texture).max(), 1e-12)

    samples = np.empty((bands, height, width), dtype=np.float32)
    for b in range(bands):
        gain = rng.uniform(0.12, 0.2)
        level = rng.uniform(0.4, 0.6)
        samples[b] = lo + span * (level + gain * texture)
    return MultiBandRaster(samples, value_range)


def make_synthetic_pair(
    clean: MultiBandRaster,
    noise: Plane,
    band: int,
) -> tuple[MultiBandRaster, MultiBandRaster]:
    """
    Add noise to one band and clip to the declared range

    Args:
        clean: Ground-truth raster (returned unmodified)
        noise: Noise plane matching the raster dimensions
        band: Band receiving the noise

    Returns:
        (noisy, clean)
    """
    if noise.shape != (clean.height, clean.width):
        raise DimensionError(f"noise shape {noise.shape} does not match raster {(clean.height, clean.width)}")
    if not 0 <= band < clean.bands:
        raise DimensionError(f"band {band} out of range for {clean.bands}-band raster")

    samples = clean.samples.astype(np.float64)
    samples[band] += noise
    noisy = clip_to_range(MultiBandRaster(samples, clean.range))
    logger.debug("synthetic_pair_built", band=band, noise_rms=float(np.sqrt(np.mean(noise**2))))
    return noisy, clean
