"""
`eval`: PSNR and SSIM of a test raster against ground truth
"""
import argparse
import csv
import io
from pathlib import Path
from typing import Optional

import numpy as np

from app.core.config import Settings
from app.core.errors import DimensionError
from app.core.logging import get_logger
from app.repositories.base import atomic_write_text
from app.schemas.evaluation import SsimConfig
from app.services.metrics import DEFAULT_PEAK, psnr, ssim
from app.services.raster_io import read_raster

logger = get_logger(__name__)

CSV_HEADER = ("truth", "test", "band", "psnr", "ssim")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("eval", help="PSNR/SSIM of a test raster against ground truth")
    parser.add_argument("--truth", type=Path, required=True)
    parser.add_argument("--test", type=Path, required=True)
    parser.add_argument("--peak", type=float, default=DEFAULT_PEAK, help="Peak value L")
    parser.add_argument("--band", type=int, default=None, help="Evaluate one band only")
    parser.add_argument("--csv", type=Path, default=None, help="Append the CSV row to this file")
    parser.set_defaults(handler=handle)


def evaluate_rasters(truth: np.ndarray, test: np.ndarray, peak: float, band: Optional[int]) -> tuple[float, float]:
    """
    PSNR over all selected samples and SSIM averaged over selected bands

    Args:
        truth: Samples (bands, height, width)
        test: Samples (bands, height, width)
        peak: Peak value L
        band: Single band to evaluate, or None for every band

    Returns:
        (psnr dB, ssim)
    """
    if truth.shape != test.shape:
        raise DimensionError(f"truth {truth.shape} and test {test.shape} differ")
    if band is not None:
        if not 0 <= band < truth.shape[0]:
            raise DimensionError(f"band {band} out of range for {truth.shape[0]} bands")
        truth, test = truth[band : band + 1], test[band : band + 1]
    ssim_cfg = SsimConfig(dynamic_range=peak)
    score = float(np.mean([ssim(a, b, ssim_cfg) for a, b in zip(truth, test)]))
    return psnr(truth, test, peak), score


def _csv_row(values: tuple) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerow(values)
    return buffer.getvalue()


def handle(args: argparse.Namespace, settings: Settings) -> int:
    truth = read_raster(args.truth, settings.data_range)
    test = read_raster(args.test, settings.data_range)
    db, score = evaluate_rasters(truth.samples, test.samples, args.peak, args.band)

    band = "all" if args.band is None else str(args.band)
    row = _csv_row((str(args.truth), str(args.test), band, f"{db:.6f}", f"{score:.8f}"))
    print(f"PSNR {db:.4f} SSIM {score:.6f}")
    print(row, end="")

    if args.csv is not None:
        existing = args.csv.read_text(encoding="utf-8") if args.csv.is_file() else _csv_row(CSV_HEADER)
        atomic_write_text(args.csv, existing + row)
    logger.info("eval_finished", psnr=db, ssim=score, band=band)
    return 0
