"""
`baseline-destripe`: moment-matching destriping of every band
"""
import argparse
from pathlib import Path

import numpy as np

from app.core.config import Settings
from app.core.logging import get_logger
from app.domain.models import MultiBandRaster
from app.services.inference_flows import moment_match_destripe
from app.services.raster_io import clip_to_range, read_raster, write_raster

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("baseline-destripe", help="Moment-matching destriping baseline")
    parser.add_argument("--in", dest="input", type=Path, required=True)
    parser.add_argument("--out", type=Path, required=True)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    raster = read_raster(args.input, settings.data_range)
    samples = np.stack([moment_match_destripe(raster.band(b)) for b in range(raster.bands)])
    write_raster(clip_to_range(MultiBandRaster(samples, raster.range)), args.out)
    logger.info("baseline_destripe_finished", bands=raster.bands, out=str(args.out))
    return 0
