"""
Unit tests for domain stores, resampling and patch sampling
"""
import numpy as np
import pytest

from app.core.errors import BandCountError, PipelineSizeError
from app.domain.models import DomainKind, DomainStore, MultiBandRaster, NoiseMode, SubbandSelection
from app.schemas.training import PatchSpec
from app.services.data_pipeline import (
    build_subband_store,
    crop_capacity,
    downsample_vertical,
    sample_patch,
    split_scene,
    upsample_vertical,
)
from app.services.noise_synth import gen_clean_scene


def test_downsample_averages_blocks():
    """Test each output row is the mean of `factor` input rows"""
    plane = np.arange(8 * 3, dtype=np.float64).reshape(8, 3)

    down = downsample_vertical(plane, 4)

    np.testing.assert_allclose(down, [plane[:4].mean(axis=0), plane[4:].mean(axis=0)])


def test_downsample_drops_partial_block():
    """Test trailing rows that do not fill a block are ignored"""
    assert downsample_vertical(np.ones((70, 2)), 32).shape == (2, 2)


def test_downsample_is_exact_on_column_constant_planes(rng: np.random.Generator):
    """Test vertically constant columns survive bit for bit"""
    row = rng.normal(0, 1300, size=17).astype(np.float32)
    plane = np.tile(row, (64, 1))

    np.testing.assert_array_equal(downsample_vertical(plane, 32), np.tile(row, (2, 1)))


def test_downsample_rejects_short_planes():
    """Test fewer rows than the factor is a size error"""
    with pytest.raises(PipelineSizeError):
        downsample_vertical(np.zeros((10, 4)), 32)


def test_upsample_repeats_and_crops():
    """Test rows are replicated then cut to the target height"""
    plane = np.array([[1.0, 2.0], [3.0, 4.0]])

    up = upsample_vertical(plane, 3, target_height=5)

    np.testing.assert_array_equal(up, [[1, 2], [1, 2], [1, 2], [3, 4], [3, 4]])


def test_upsample_extends_with_edge_rows():
    """Test targets above factor * height repeat the last row"""
    up = upsample_vertical(np.array([[1.0], [2.0]]), 4, target_height=10)

    assert up[:, 0].tolist() == [1, 1, 1, 1, 2, 2, 2, 2, 2, 2]


def test_upsample_rejects_unreachable_target():
    """Test targets more than one block beyond the input are rejected"""
    with pytest.raises(PipelineSizeError):
        upsample_vertical(np.zeros((2, 2)), 4, target_height=13)


def test_split_scene_halves():
    """Test top and bottom halves partition the rows"""
    raster = gen_clean_scene(8, 10, 1, seed=1)

    top, bottom = split_scene(raster, "top"), split_scene(raster, "bottom")

    assert top.height == 5 and bottom.height == 5
    np.testing.assert_array_equal(np.concatenate([top.samples, bottom.samples], axis=1), raster.samples)
    assert split_scene(raster, "all") is raster


def test_stripe_store_items_are_downsampled_subbands():
    """Test stripe stores hold one 1-channel item per scene"""
    scenes = [gen_clean_scene(64, 128, 1, seed=s) for s in range(3)]

    store = build_subband_store(
        scenes, DomainKind.CLEAN, NoiseMode.STRIPE, SubbandSelection.parse("HL:1-4"), 4, factor=8
    )

    assert len(store) == 3
    assert store.channels == 1
    assert store.items[0].shape == (1, 16, 64)
    assert store.items[0].dtype == np.float32
    assert store.provenance == ["scene-0", "scene-1", "scene-2"]


def test_store_items_are_read_only():
    """Test stored items cannot be modified in place"""
    store = build_subband_store(
        [gen_clean_scene(32, 64, 1, seed=0)],
        DomainKind.NOISY,
        NoiseMode.STRIPE,
        SubbandSelection.parse("HL:1-3"),
        3,
        factor=8,
    )

    with pytest.raises(ValueError):
        store.items[0][0, 0, 0] = 1.0


def test_wave_store_stacks_four_channels():
    """Test wave stores stack per-band projections"""
    store = build_subband_store(
        [gen_clean_scene(32, 32, 4, seed=0)],
        DomainKind.CLEAN,
        NoiseMode.WAVE,
        SubbandSelection.parse("LH:1-3"),
        3,
    )

    assert store.items[0].shape == (4, 32, 32)


def test_wave_store_green_only():
    """Test the green-only variant keeps one channel"""
    store = build_subband_store(
        [gen_clean_scene(32, 32, 4, seed=0)],
        DomainKind.CLEAN,
        NoiseMode.WAVE,
        SubbandSelection.parse("LH:1-3"),
        3,
        wave_channels="green",
    )

    assert store.channels == 1


def test_image_domain_store_skips_projection():
    """Test use_subbands=False keeps the (downsampled) image plane"""
    scene = gen_clean_scene(16, 32, 1, seed=2)

    store = build_subband_store(
        [scene], DomainKind.CLEAN, NoiseMode.STRIPE, SubbandSelection.parse("HL:1-2"), 2,
        factor=8, use_subbands=False,
    )

    np.testing.assert_allclose(store.items[0][0], downsample_vertical(scene.band(0).astype(np.float64), 8), rtol=1e-6)


def test_wave_store_requires_four_bands():
    """Test wave mode rejects single-band scenes"""
    with pytest.raises(BandCountError):
        build_subband_store(
            [gen_clean_scene(32, 32, 1, seed=0)],
            DomainKind.CLEAN,
            NoiseMode.WAVE,
            SubbandSelection.parse("LH:1-3"),
            3,
        )


def test_empty_scene_list_is_size_error():
    """Test a store needs at least one scene"""
    with pytest.raises(PipelineSizeError):
        build_subband_store([], DomainKind.CLEAN, NoiseMode.STRIPE, SubbandSelection.parse("HL:1"), 1)


def _counting_store(height: int = 8, width: int = 12) -> DomainStore:
    item = np.arange(height * width, dtype=np.float32).reshape(1, height, width)
    return DomainStore(DomainKind.CLEAN, NoiseMode.WAVE, [item], ["ramp"])


def test_sample_patch_is_a_crop_of_the_item():
    """Test unflipped patches are contiguous crops"""
    store = _counting_store()
    spec = PatchSpec(mode=NoiseMode.WAVE, patch_width=4, patch_height=3, flip_horizontal=False, flip_vertical=False)

    patch = sample_patch(store, spec, np.random.default_rng(0))

    top, left = divmod(int(patch[0, 0, 0]), 12)
    np.testing.assert_array_equal(patch, store.items[0][:, top : top + 3, left : left + 4])


def test_sample_patch_is_deterministic_per_seed():
    """Test equal seeds give equal patch sequences"""
    store = _counting_store()
    spec = PatchSpec(mode=NoiseMode.WAVE, patch_width=4, patch_height=4)

    first = [sample_patch(store, spec, np.random.default_rng(5)) for _ in range(3)]
    second = [sample_patch(store, spec, np.random.default_rng(5)) for _ in range(3)]

    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)


def test_flips_only_reorder_values():
    """Test flipped patches contain the same multiset of values as some crop"""
    store = _counting_store()
    spec = PatchSpec(mode=NoiseMode.WAVE, patch_width=4, patch_height=4)
    gen = np.random.default_rng(11)

    for _ in range(10):
        patch = sample_patch(store, spec, gen)
        values = np.sort(patch.ravel())
        top, left = divmod(int(values[0]), 12)
        crop = store.items[0][:, top : top + 4, left : left + 4]
        np.testing.assert_array_equal(values, np.sort(crop.ravel()))


def test_patch_larger_than_item():
    """Test oversized patches are a size error"""
    spec = PatchSpec(mode=NoiseMode.WAVE, patch_width=64, patch_height=64)

    with pytest.raises(PipelineSizeError):
        sample_patch(_counting_store(), spec, np.random.default_rng(0))


def test_crop_capacity_counts_non_overlapping_crops():
    """Test capacity is the number of disjoint crops summed over items"""
    spec = PatchSpec(mode=NoiseMode.WAVE, patch_width=4, patch_height=4)

    assert crop_capacity(_counting_store(8, 12), spec) == 2 * 3
