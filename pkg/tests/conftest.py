"""
Pytest configuration and shared fixtures
"""
import os
from collections.abc import Generator
from pathlib import Path

import numpy as np
import pytest

from app.core.config import Settings, get_settings
from app.domain.models import Checkpoint, MultiBandRaster, NoiseMode
from app.schemas.noise import StripeNoiseParams, WaveNoiseParams
from app.schemas.training import TrainConfig
from app.services.nn_models import zero_head
from app.services.noise_synth import gen_clean_scene, gen_stripe_noise, gen_wave_noise, make_synthetic_pair
from app.services.training import CycleGANTrainer


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """
    Isolate every test from the caller's WAVCYCLE_* environment and the
    cached settings instance
    """
    for name in list(os.environ):
        if name.startswith("WAVCYCLE_"):
            monkeypatch.delenv(name)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def test_settings() -> Settings:
    """
    Test-specific settings: serial deterministic mode on one CPU thread

    Returns:
        Settings instance configured for testing
    """
    return Settings(
        app_name="wavcyclegan-test",
        app_version="1.0.0-test",
        seed=0,
        serial=True,
        threads=1,
        device="cpu",
        log_level="DEBUG",
    )


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data"""
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_stripe_config() -> TrainConfig:
    """
    Stripe config small enough for CPU unit tests

    512-row scenes downsample by 8 into 64 rows, which leaves room for
    32-row patches and the discriminator footprint.
    """
    return TrainConfig(
        mode=NoiseMode.STRIPE,
        epochs=1,
        iters_per_epoch=3,
        decay_start_epoch=0,
        lr0=2e-4,
        seed=0,
        log_every=1,
        patch_width=64,
        patch_height=32,
        wavelet_levels=4,
        selection="HL:1-4",
        downsample_factor=8,
        train_split="all",
        gen_depth=2,
        gen_base_width=4,
        gen_max_width=16,
        disc_base_width=4,
    )


@pytest.fixture
def tiny_wave_config() -> TrainConfig:
    """Wave config with 32x32 patches and 4-channel tiny networks"""
    return TrainConfig(
        mode=NoiseMode.WAVE,
        epochs=1,
        iters_per_epoch=3,
        decay_start_epoch=0,
        lr0=2e-4,
        seed=0,
        log_every=1,
        patch_width=32,
        patch_height=32,
        wavelet_levels=3,
        selection="LH:1-3",
        train_split="all",
        gen_depth=2,
        gen_base_width=4,
        gen_max_width=16,
        disc_base_width=4,
    )


def identity_checkpoint(cfg: TrainConfig) -> Checkpoint:
    """Checkpoint whose G is the residual identity map"""
    trainer = CycleGANTrainer(cfg, device="cpu")
    zero_head(trainer.networks["G"])
    return trainer.to_checkpoint()


@pytest.fixture
def stripe_identity_checkpoint(tiny_stripe_config: TrainConfig) -> Checkpoint:
    return identity_checkpoint(tiny_stripe_config)


@pytest.fixture
def wave_identity_checkpoint(tiny_wave_config: TrainConfig) -> Checkpoint:
    return identity_checkpoint(tiny_wave_config)


@pytest.fixture
def stripe_pair() -> tuple[MultiBandRaster, MultiBandRaster]:
    """(noisy, clean) 1-band 128x128 scene with drift-free stripes"""
    clean = gen_clean_scene(128, 128, 1, seed=11)
    noise = gen_stripe_noise(128, 128, StripeNoiseParams(sigma=1300.0, seed=12))
    return make_synthetic_pair(clean, noise, 0)


@pytest.fixture
def wave_pair() -> tuple[MultiBandRaster, MultiBandRaster]:
    """(noisy, clean) 4-band 96x80 scene with green-band waves"""
    clean = gen_clean_scene(96, 80, 4, seed=21)
    noise = gen_wave_noise(96, 80, WaveNoiseParams(periods=[8.0, 20.0], seed=22))
    return make_synthetic_pair(clean, noise, 1)


@pytest.fixture
def workdir(tmp_path: Path) -> Path:
    """
    Temporary working directory for files written by a test

    Args:
        tmp_path: Pytest temporary directory

    Returns:
        Path to an empty directory
    """
    path = tmp_path / "work"
    path.mkdir(exist_ok=True)
    return path


# Pytest markers for test categorization
def pytest_configure(config):
    """Configure custom pytest markers"""
    config.addinivalue_line("markers", "unit: Unit tests (fast, isolated)")
    config.addinivalue_line("markers", "integration: Integration tests (CLI end to end, files on disk)")
    config.addinivalue_line("markers", "slow: Slow tests (desk-scale training runs)")


# Auto-apply markers based on test location
def pytest_collection_modifyitems(config, items):
    """Auto-apply markers based on test file location"""
    for item in items:
        if "unit" in str(item.fspath):
            item.add_marker(pytest.mark.unit)
        elif "integration" in str(item.fspath):
            item.add_marker(pytest.mark.integration)
