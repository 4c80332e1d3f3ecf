"""
Unpaired subband-image stores and augmented patch sampling
"""
from typing import Literal, Optional, Sequence

import numpy as np

from app.core.errors import BandCountError, PipelineSizeError
from app.core.logging import get_logger
from app.domain.models import (
    GREEN_BAND,
    DomainKind,
    DomainStore,
    MultiBandRaster,
    NoiseMode,
    Plane,
    SubbandSelection,
)
from app.schemas.training import PatchSpec
from app.services.wavelet import subband_project

logger = get_logger(__name__)

STRIPE_FACTOR = 32


def downsample_vertical(p: Plane, factor: int = STRIPE_FACTOR) -> Plane:
    """
    Average each block of `factor` rows into one row

    Trailing rows that do not fill a block are dropped. The mean is taken
    relative to the first row of each block so vertically constant columns are
    reproduced bit-for-bit.

    Args:
        p: Plane (height, width)
        factor: Rows per block

    Returns:
        Plane (height // factor, width)
    """
    height, width = p.shape
    if factor < 1 or height < factor:
        raise PipelineSizeError(f"cannot downsample {height} rows by {factor}")
    blocks = p[: (height // factor) * factor].reshape(height // factor, factor, width)
    base = blocks[:, 0, :]
    return base + (blocks - base[:, np.newaxis, :]).mean(axis=1, dtype=np.float64).astype(p.dtype)


def upsample_vertical(p: Plane, factor: int = STRIPE_FACTOR, target_height: Optional[int] = None) -> Plane:
    """
    Replicate every row `factor` times, then crop or edge-extend to the target

    Args:
        p: Plane (height, width)
        factor: Replication factor
        target_height: Output rows (defaults to factor * height)

    Returns:
        Plane (target_height, width)
    """
    height = p.shape[0]
    target = factor * height if target_height is None else target_height
    if target < 1 or target > factor * height + factor:
        raise PipelineSizeError(f"target height {target} unreachable from {height} rows x {factor}")
    tall = np.repeat(p, factor, axis=0)
    if target <= tall.shape[0]:
        return tall[:target]
    return np.pad(tall, ((0, target - tall.shape[0]), (0, 0)), mode="edge")


def split_scene(raster: MultiBandRaster, part: Literal["top", "bottom", "all"]) -> MultiBandRaster:
    """
    Top half trains, bottom half tests

    Args:
        raster: Scene
        part: "top", "bottom" or "all"

    Returns:
        Raster restricted to the requested rows
    """
    if part == "all":
        return raster
    half = raster.height // 2
    if half < 1:
        raise PipelineSizeError(f"cannot split a {raster.height}-row scene")
    rows = slice(0, half) if part == "top" else slice(half, None)
    return MultiBandRaster(raster.samples[:, rows, :].copy(), raster.range)


def stripe_item(
    plane: Plane,
    levels: int,
    selection: SubbandSelection,
    factor: int,
    use_subbands: bool = True,
) -> np.ndarray:
    """Downsampled (subband) plane of one stripe-mode band as a 1-channel item"""
    source = subband_project(plane, levels, selection) if use_subbands else np.asarray(plane, np.float64)
    return downsample_vertical(source, factor)[np.newaxis].astype(np.float32)


def wave_item(
    raster: MultiBandRaster,
    levels: int,
    selection: SubbandSelection,
    channels: Literal["rgbn", "green"] = "rgbn",
    use_subbands: bool = True,
) -> np.ndarray:
    """Per-channel (subband) stack of one wave-mode scene"""
    if raster.bands != 4:
        raise BandCountError(f"wave mode needs 4-band RGBN rasters, got {raster.bands} bands")
    indices = range(4) if channels == "rgbn" else (GREEN_BAND,)
    planes = [
        subband_project(raster.band(b), levels, selection) if use_subbands else raster.band(b).astype(np.float64)
        for b in indices
    ]
    return np.stack(planes).astype(np.float32)


def build_subband_store(
    scenes: Sequence[MultiBandRaster],
    domain: DomainKind,
    mode: NoiseMode,
    selection: SubbandSelection,
    levels: int,
    factor: int = STRIPE_FACTOR,
    provenance: Optional[Sequence[str]] = None,
    use_subbands: bool = True,
    wave_channels: Literal["rgbn", "green"] = "rgbn",
) -> DomainStore:
    """
    Build one unpaired domain store

    Stripe: subband projection then vertical downsampling per scene.
    Wave: per-channel subband projection stacked into a 4-channel item
    (or the green channel alone).

    Args:
        scenes: Rasters of one domain
        domain: Clean or noisy
        mode: Stripe or wave
        selection: Subbands kept
        levels: Decomposition depth
        factor: Stripe downsampling factor
        provenance: Scene ids (defaults to indices)
        use_subbands: False trains on image planes (image-domain ablation)
        wave_channels: Channels stacked in wave mode

    Returns:
        DomainStore
    """
    if not scenes:
        raise PipelineSizeError("cannot build a store from zero scenes")
    ids = list(provenance) if provenance is not None else [f"scene-{i}" for i in range(len(scenes))]

    items = []
    for raster in scenes:
        if mode is NoiseMode.STRIPE:
            if raster.bands != 1:
                raise BandCountError(f"stripe mode needs single-band rasters, got {raster.bands} bands")
            items.append(stripe_item(raster.band(0), levels, selection, factor, use_subbands))
        else:
            items.append(wave_item(raster, levels, selection, wave_channels, use_subbands))

    store = DomainStore(domain=domain, mode=mode, items=items, provenance=ids)
    logger.info(
        "store_built",
        domain=domain.value,
        mode=mode.value,
        items=len(store),
        item_shape=list(items[0].shape),
        selection=str(selection),
    )
    return store


def sample_patch(store: DomainStore, spec: PatchSpec, rng: np.random.Generator) -> np.ndarray:
    """
    Draw one augmented crop

    Draw order per call: item index, top, left, horizontal flip, vertical flip.

    Args:
        store: Non-empty domain store
        spec: Patch geometry and flips
        rng: Generator owned exclusively by this consumer

    Returns:
        Patch (channels, patch_height, patch_width), float32
    """
    if len(store) == 0:
        raise PipelineSizeError("cannot sample from an empty store")
    item = store.items[int(rng.integers(len(store)))]
    _, height, width = item.shape
    if spec.patch_height > height or spec.patch_width > width:
        raise PipelineSizeError(
            f"patch {spec.patch_width}x{spec.patch_height} larger than item {width}x{height}"
        )
    top = int(rng.integers(height - spec.patch_height + 1))
    left = int(rng.integers(width - spec.patch_width + 1))
    patch = item[:, top : top + spec.patch_height, left : left + spec.patch_width]
    flip_h = rng.random() < 0.5
    flip_v = rng.random() < 0.5
    if spec.flip_horizontal and flip_h:
        patch = patch[:, :, ::-1]
    if spec.flip_vertical and flip_v:
        patch = patch[:, ::-1, :]
    return np.ascontiguousarray(patch, dtype=np.float32)


def crop_capacity(store: DomainStore, spec: PatchSpec) -> int:
    """Non-overlapping crop capacity of the whole store"""
    total = 0
    for item in store.items:
        _, height, width = item.shape
        total += max(height // spec.patch_height, 0) * max(width // spec.patch_width, 0)
    return max(total, 1)
