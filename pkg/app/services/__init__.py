"""Services module - wavelet-subband CycleGAN denoising"""
from app.services.inference_flows import (
    DenoiseResult,
    assemble_tiles,
    destripe_scene,
    dewave_scene,
    estimate_noise,
    extract_tiles,
    moment_match_destripe,
)
from app.services.metrics import psnr, ssim
from app.services.raster_io import clip_to_range, read_raster, write_raster
from app.services.training import CycleGANTrainer, build_stores, load_generator, train
from app.services.wavelet import dwt2_multilevel, idwt2_multilevel, subband_project

__all__ = [
    # Raster I/O
    "read_raster",
    "write_raster",
    "clip_to_range",
    # Wavelets
    "dwt2_multilevel",
    "idwt2_multilevel",
    "subband_project",
    # Training
    "CycleGANTrainer",
    "build_stores",
    "train",
    "load_generator",
    # Inference
    "DenoiseResult",
    "estimate_noise",
    "extract_tiles",
    "assemble_tiles",
    "destripe_scene",
    "dewave_scene",
    "moment_match_destripe",
    # Metrics
    "psnr",
    "ssim",
]
