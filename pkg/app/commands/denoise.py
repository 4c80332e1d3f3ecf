"""
`denoise`: stripe or wave removal on one scene with a trained checkpoint
"""
import argparse
from pathlib import Path

from app.commands.common import add_mode_argument
from app.core.config import Settings
from app.core.logging import get_logger
from app.domain.models import MultiBandRaster, NoiseMode
from app.repositories.checkpoint_repository import CheckpointRepository
from app.schemas.evaluation import InferenceConfig
from app.services.inference_flows import destripe_scene, dewave_scene
from app.services.raster_io import read_raster, write_raster

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("denoise", help="Remove stripe or wave noise from a scene")
    add_mode_argument(parser)
    parser.add_argument("--ckpt", type=Path, required=True, help="Trained checkpoint (.wckp)")
    parser.add_argument("--in", dest="input", type=Path, required=True, help="Noisy scene")
    parser.add_argument("--out", type=Path, required=True, help="Clean scene")
    parser.add_argument("--noise-out", type=Path, default=None, help="Estimated noise plane")
    parser.add_argument("--tile-size", type=int, default=128, help="Wave-mode tile side")
    parser.add_argument("--window", type=int, default=None, help="Stripe-mode window width")
    parser.add_argument("--whole-scene", action="store_true", help="Stripe mode: no horizontal tiling")
    parser.add_argument("--no-clip", action="store_true", help="Keep values outside the data range")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    cfg = InferenceConfig(
        tile_size=args.tile_size,
        stripe_window=args.window,
        whole_scene=args.whole_scene,
        clip=not args.no_clip,
        threads=settings.threads,
    )
    raster = read_raster(args.input, settings.data_range)
    ckpt = CheckpointRepository().load(args.ckpt)
    flow = destripe_scene if args.mode is NoiseMode.STRIPE else dewave_scene
    result = flow(raster, ckpt, cfg)

    write_raster(result.clean, args.out)
    if args.noise_out is not None:
        # noise is signed, so its declared range is unbounded
        noise = MultiBandRaster(result.noise, (float("-inf"), float("inf")))
        write_raster(noise, args.noise_out)
    logger.info("denoise_finished", mode=args.mode.value, out=str(args.out))
    print(args.out)
    return 0
