"""
Scene reconstruction flows, overlapping-tile assembly and the
moment-matching destriping baseline
"""
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
import torch

from app.core.errors import BandCountError, DimensionError, LayoutError, ModeError, ModelSizeError
from app.core.logging import get_logger
from app.domain.models import GREEN_BAND, Checkpoint, MultiBandRaster, NoiseMode, Plane, TileLayout
from app.schemas.evaluation import InferenceConfig
from app.schemas.training import TrainConfig
from app.services.data_pipeline import downsample_vertical, upsample_vertical
from app.services.nn_models import TightFrameUNet, generator_forward
from app.services.training import load_generator
from app.services.wavelet import subband_project
from app.workers.tile_worker import get_tile_worker

logger = get_logger(__name__)

# Maps a network-unit tile (C, H, W) to its denoised version
TileDenoiser = Callable[[np.ndarray], np.ndarray]

# Relative to the data range; projection residue below it is treated as exact zero
RESIDUE_TOLERANCE = 1e-9


class DenoiseResult(NamedTuple):
    clean: MultiBandRaster
    noise: Plane


def estimate_noise(sub_noisy: Plane, sub_denoised: Plane) -> Plane:
    """Noise pattern as noisy minus denoised subband image"""
    if sub_noisy.shape != sub_denoised.shape:
        raise DimensionError(f"noise estimate needs equal shapes, got {sub_noisy.shape} and {sub_denoised.shape}")
    return sub_noisy - sub_denoised


def _spatial_padding(shape: tuple[int, ...], layout: TileLayout) -> list[tuple[int, int]]:
    height, width = shape[-2:]
    rows, cols = layout.grid(height, width)
    extra_h = rows * layout.stride_h - height
    extra_w = cols * layout.stride_w - width
    pad = [(0, 0)] * (len(shape) - 2)
    pad.append((layout.margin_h, layout.margin_h + extra_h))
    pad.append((layout.margin_w, layout.margin_w + extra_w))
    return pad


def extract_tiles(plane: np.ndarray, layout: TileLayout) -> list[np.ndarray]:
    """
    Cut a reflect-padded scene into overlapping tiles, row-major

    The scene is padded by the core margin on every side and extended so the
    core grid covers it; tile (i, j) starts at (i * stride_h, j * stride_w) of
    the padded scene. Leading axes (channels) are carried along.

    Args:
        plane: Array (..., height, width)
        layout: Tile geometry

    Returns:
        Tiles (..., tile_h, tile_w)
    """
    height, width = plane.shape[-2:]
    rows, cols = layout.grid(height, width)
    padded = np.pad(plane, _spatial_padding(plane.shape, layout), mode="reflect")
    tiles = []
    for i in range(rows):
        for j in range(cols):
            top, left = i * layout.stride_h, j * layout.stride_w
            tiles.append(padded[..., top : top + layout.tile_h, left : left + layout.tile_w])
    return tiles


def assemble_tiles(tiles: Sequence[np.ndarray], layout: TileLayout, scene_dims: tuple[int, int]) -> np.ndarray:
    """
    Stitch tile cores back into a scene

    Each output pixel is copied from exactly one tile core; nothing is
    averaged across seams.

    Args:
        tiles: Row-major tiles as produced by `extract_tiles`
        layout: Tile geometry
        scene_dims: (height, width) of the scene

    Returns:
        Array (..., height, width)
    """
    height, width = scene_dims
    rows, cols = layout.grid(height, width)
    if len(tiles) != rows * cols:
        raise LayoutError(f"{len(tiles)} tiles cannot cover a {rows}x{cols} grid for a {width}x{height} scene")
    lead = tiles[0].shape[:-2]
    for tile in tiles:
        if tile.shape != (*lead, layout.tile_h, layout.tile_w):
            raise LayoutError(f"tile shape {tile.shape} does not match layout {layout.tile_h}x{layout.tile_w}")

    out = np.empty((*lead, rows * layout.stride_h, cols * layout.stride_w), dtype=tiles[0].dtype)
    mh, mw, sh, sw = layout.margin_h, layout.margin_w, layout.stride_h, layout.stride_w
    for index, tile in enumerate(tiles):
        i, j = divmod(index, cols)
        out[..., i * sh : (i + 1) * sh, j * sw : (j + 1) * sw] = tile[..., mh : mh + sh, mw : mw + sw]
    return out[..., :height, :width]


def generator_denoiser(model: TightFrameUNet) -> TileDenoiser:
    """Wrap a generator as a numpy tile function"""
    device = next(model.parameters()).device

    def denoise(tile: np.ndarray) -> np.ndarray:
        with torch.inference_mode():
            out = generator_forward(model, torch.from_numpy(np.ascontiguousarray(tile)).to(device))
        return out.cpu().numpy()

    return denoise


def _round_up(value: int, step: int) -> int:
    return -(-value // step) * step


def _network_units(values: np.ndarray, scale: float, value_range: tuple[float, float]) -> np.ndarray:
    """
    Scale DN samples into network units, flushing float residue to zero

    Subband projections of flat regions leave residue near 1e-12 DN; instance
    norms would amplify it into visible noise.
    """
    tolerance = RESIDUE_TOLERANCE * (value_range[1] - value_range[0])
    flushed = np.where(np.abs(values) < tolerance, 0.0, values)
    return (flushed / scale).astype(np.float32)


def _tile_noise(
    stack: np.ndarray,
    denoiser: TileDenoiser,
    layout: TileLayout,
    channel: int,
    threads: int,
) -> np.ndarray:
    """Per-tile noise of one channel of a network-unit stack (C, H, W), assembled"""
    tiles = extract_tiles(stack, layout)

    def noise_of(tile: np.ndarray) -> np.ndarray:
        denoised = denoiser(tile)
        return estimate_noise(tile[channel], denoised[channel])

    noise_tiles = get_tile_worker(threads).map(noise_of, tiles)
    return assemble_tiles(noise_tiles, layout, stack.shape[-2:])


def stripe_flow(
    raster: MultiBandRaster,
    denoiser: TileDenoiser,
    train_cfg: TrainConfig,
    cfg: Optional[InferenceConfig] = None,
) -> DenoiseResult:
    """
    Vertical-stripe removal for a single-band scene

    subband projection -> vertical downsampling -> windowed generator over
    whole rows -> noise estimate -> vertical upsampling -> subtraction.

    Args:
        raster: 1-band scene
        denoiser: Network-unit tile denoiser
        train_cfg: Config the model was trained with
        cfg: Inference options

    Returns:
        DenoiseResult with the clean raster and the image-space noise plane
    """
    cfg = cfg or InferenceConfig()
    if raster.bands != 1:
        raise BandCountError(f"stripe flow needs a single-band raster, got {raster.bands} bands")
    step = 2**train_cfg.gen_depth
    factor = train_cfg.downsample_factor
    scale = np.float32(train_cfg.sample_scale)

    plane = raster.band(0).astype(np.float64)
    sub = subband_project(plane, train_cfg.levels, train_cfg.subband_selection()) if train_cfg.use_subbands else plane
    down = downsample_vertical(sub, factor)
    rows, width = down.shape
    strip_h = _round_up(rows, step)
    if cfg.whole_scene:
        window = _round_up(width, step)
        layout = TileLayout(tile_h=strip_h, tile_w=window, stride_h=strip_h, stride_w=window)
    else:
        window = cfg.stripe_window or train_cfg.patch_spec().patch_width
        if window % step or window % 4:
            raise ModelSizeError(f"stripe window {window} must be divisible by {max(step, 4)}")
        layout = TileLayout(tile_h=strip_h, tile_w=window, stride_h=strip_h, stride_w=window // 2)

    scaled = _network_units(down, scale, raster.range)
    if strip_h != rows:
        scaled = np.pad(scaled, ((0, strip_h - rows), (0, 0)), mode="reflect")
    noise_down = _tile_noise(scaled[np.newaxis], denoiser, layout, 0, cfg.threads)[:rows] * scale
    noise = upsample_vertical(noise_down, factor, raster.height)

    clean = plane - noise
    if cfg.clip:
        clean = np.clip(clean, *raster.range)
    logger.info(
        "stripe_flow_finished",
        width=raster.width,
        height=raster.height,
        downsampled_rows=rows,
        window=layout.tile_w,
        tiles=int(np.prod(layout.grid(strip_h, width))),
        noise_rms=float(np.sqrt(np.mean(np.square(noise, dtype=np.float64)))),
    )
    return DenoiseResult(MultiBandRaster(clean[np.newaxis], raster.range), noise.astype(np.float32))


def wave_flow(
    raster: MultiBandRaster,
    denoiser: TileDenoiser,
    train_cfg: TrainConfig,
    cfg: Optional[InferenceConfig] = None,
) -> DenoiseResult:
    """
    Horizontal wave-noise removal on the green band of an RGBN scene

    Args:
        raster: 4-band scene
        denoiser: Network-unit tile denoiser
        train_cfg: Config the model was trained with
        cfg: Inference options

    Returns:
        DenoiseResult; only the green band differs from the input
    """
    cfg = cfg or InferenceConfig()
    if raster.bands != 4:
        raise ModeError(f"wave flow needs a 4-band RGBN raster, got {raster.bands} bands")
    step = 2**train_cfg.gen_depth
    if cfg.tile_size % step or cfg.tile_size % 4:
        raise ModelSizeError(f"tile size {cfg.tile_size} must be divisible by {max(step, 4)}")
    scale = np.float32(train_cfg.sample_scale)

    indices = range(4) if train_cfg.wave_channels == "rgbn" else (GREEN_BAND,)
    selection = train_cfg.subband_selection()
    planes = []
    for band in indices:
        plane = raster.band(band).astype(np.float64)
        planes.append(subband_project(plane, train_cfg.levels, selection) if train_cfg.use_subbands else plane)
    stack = _network_units(np.stack(planes), scale, raster.range)
    channel = list(indices).index(GREEN_BAND)

    half = cfg.tile_size // 2
    layout = TileLayout(tile_h=cfg.tile_size, tile_w=cfg.tile_size, stride_h=half, stride_w=half)
    noise = _tile_noise(stack, denoiser, layout, channel, cfg.threads) * scale

    green = raster.band(GREEN_BAND).astype(np.float64) - noise
    if cfg.clip:
        green = np.clip(green, *raster.range)
    samples = raster.samples.copy()
    samples[GREEN_BAND] = green
    logger.info(
        "wave_flow_finished",
        width=raster.width,
        height=raster.height,
        channels=len(planes),
        tiles=int(np.prod(layout.grid(raster.height, raster.width))),
        noise_rms=float(np.sqrt(np.mean(np.square(noise, dtype=np.float64)))),
    )
    return DenoiseResult(MultiBandRaster(samples, raster.range), noise.astype(np.float32))


def destripe_scene(raster: MultiBandRaster, ckpt: Checkpoint, cfg: Optional[InferenceConfig] = None) -> DenoiseResult:
    """Stripe flow with the clean-direction generator of a stripe checkpoint"""
    model, train_cfg = load_generator(ckpt, NoiseMode.STRIPE)
    return stripe_flow(raster, generator_denoiser(model), train_cfg, cfg)


def dewave_scene(raster: MultiBandRaster, ckpt: Checkpoint, cfg: Optional[InferenceConfig] = None) -> DenoiseResult:
    """Wave flow with the clean-direction generator of a wave checkpoint"""
    model, train_cfg = load_generator(ckpt, NoiseMode.WAVE)
    return wave_flow(raster, generator_denoiser(model), train_cfg, cfg)


def moment_match_destripe(p: Plane) -> Plane:
    """
    Align every column's mean and standard deviation to the global ones

    Columns with zero deviation keep unit gain.

    Args:
        p: Plane (height >= 2, width)

    Returns:
        Corrected plane, float64
    """
    plane = np.asarray(p, dtype=np.float64)
    if plane.ndim != 2 or plane.shape[0] < 2:
        raise DimensionError(f"moment matching needs a plane with at least 2 rows, got {plane.shape}")
    mu_ref, sigma_ref = plane.mean(), plane.std()
    mu = plane.mean(axis=0)
    sigma = plane.std(axis=0)
    gain = np.ones_like(sigma)
    np.divide(sigma_ref, sigma, out=gain, where=sigma > 0)
    return (plane - mu) * gain + mu_ref
