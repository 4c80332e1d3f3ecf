"""
`wavelet`: subband projection of a raster, optionally printing subband energies
"""
import argparse
from pathlib import Path

import numpy as np

from app.core.config import Settings
from app.core.logging import get_logger
from app.domain.models import MultiBandRaster, SubbandSelection
from app.services.raster_io import read_raster, write_raster
from app.services.wavelet import dwt2_multilevel, subband_energies, subband_project

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("wavelet", help="Project a raster onto selected db3 subbands")
    parser.add_argument("--in", dest="input", type=Path, required=True)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--levels", type=int, required=True, help="Decomposition depth K")
    parser.add_argument("--select", type=str, required=True, help='Kept subbands, e.g. "HL:1-9" or "LH:1-6"')
    parser.add_argument("--energies", action="store_true", help="Print per-subband energies of every band")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    raster = read_raster(args.input, settings.data_range)
    selection = SubbandSelection.parse(args.select)
    selection.validate(args.levels)

    planes = [subband_project(raster.band(b), args.levels, selection) for b in range(raster.bands)]
    # projections are signed detail images, so no range applies
    write_raster(MultiBandRaster(np.stack(planes), (float("-inf"), float("inf"))), args.out)

    if args.energies:
        for band in range(raster.bands):
            energies = subband_energies(dwt2_multilevel(raster.band(band), args.levels))
            for (level, orientation), energy in sorted(energies.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
                print(f"{band}\t{orientation.value}\t{level}\t{energy:.6e}")
    logger.info("wavelet_projected", selection=str(selection), levels=args.levels, bands=raster.bands)
    return 0
