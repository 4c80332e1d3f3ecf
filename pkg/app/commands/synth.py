"""
`synth`: paired clean/noisy synthetic tiles plus a dataset manifest
"""
import argparse
import json
from pathlib import Path

import numpy as np

from app.commands.common import add_mode_argument
from app.core.config import Settings
from app.core.errors import UsageError
from app.core.logging import get_logger
from app.domain.models import GREEN_BAND, DomainKind, Manifest, ManifestEntry, NoiseMode
from app.repositories.manifest_repository import ManifestRepository
from app.schemas.noise import StripeNoiseParams, WaveNoiseParams
from app.services.noise_synth import gen_clean_scene, gen_stripe_noise, gen_wave_noise, make_synthetic_pair
from app.services.raster_io import write_raster

logger = get_logger(__name__)

MANIFEST_NAME = "manifest.tsv"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("synth", help="Generate synthetic clean/noisy tile pairs")
    add_mode_argument(parser)
    parser.add_argument("--out", type=Path, required=True, help="Output directory")
    parser.add_argument("--count", type=int, default=4, help="Number of tile pairs")
    parser.add_argument("--width", type=int, default=512)
    parser.add_argument("--height", type=int, default=512)
    parser.add_argument("--sigma", type=float, default=None, help="Stripe amplitude (DN)")
    parser.add_argument("--corr-len", type=int, default=None, help="Stripe correlation length (columns)")
    parser.add_argument("--drift", type=float, default=None, help="Stripe vertical modulation")
    parser.add_argument("--amplitude", type=float, default=None, help="Wave amplitude per sinusoid (DN)")
    parser.add_argument("--periods", type=str, default=None, help="Wave periods, comma separated")
    parser.add_argument("--phase-jitter", type=float, default=None, help="Wave phase wander (rad/column)")
    parser.set_defaults(handler=handle)


def _noise_params(args: argparse.Namespace) -> dict:
    if args.mode is NoiseMode.STRIPE:
        fields = {"sigma": args.sigma, "corr_len": args.corr_len, "drift": args.drift}
    else:
        periods = [float(p) for p in args.periods.split(",")] if args.periods else None
        fields = {"amplitude": args.amplitude, "periods": periods, "phase_jitter": args.phase_jitter}
    return {key: value for key, value in fields.items() if value is not None}


def handle(args: argparse.Namespace, settings: Settings) -> int:
    """
    Write `count` clean scenes and their noisy versions

    Scene i is written as clean/clean_<i>.wcr and noisy/noisy_<i>.wcr; both
    are listed in the manifest with their domain tag.
    """
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    overrides = _noise_params(args)
    bands = 1 if args.mode is NoiseMode.STRIPE else 4
    band = 0 if args.mode is NoiseMode.STRIPE else GREEN_BAND
    out: Path = args.out

    manifest = Manifest(header={
        "mode": args.mode.value,
        "seed": str(settings.seed),
        "count": str(args.count),
        "size": f"{args.width}x{args.height}",
    })
    for index, seq in enumerate(np.random.SeedSequence(settings.seed).spawn(args.count)):
        scene_seed, noise_seed = (int(s) for s in seq.generate_state(2, dtype=np.uint64))
        clean = gen_clean_scene(args.width, args.height, bands, scene_seed, settings.data_range)
        if args.mode is NoiseMode.STRIPE:
            params = StripeNoiseParams(seed=noise_seed, **overrides)
            noise = gen_stripe_noise(args.width, args.height, params)
        else:
            params = WaveNoiseParams(seed=noise_seed, **overrides)
            noise = gen_wave_noise(args.width, args.height, params)
        noisy, _ = make_synthetic_pair(clean, noise, band)

        clean_path = Path("clean") / f"clean_{index:03d}.wcr"
        noisy_path = Path("noisy") / f"noisy_{index:03d}.wcr"
        write_raster(clean, out / clean_path)
        write_raster(noisy, out / noisy_path)
        manifest.entries.append(ManifestEntry(clean_path, DomainKind.CLEAN, args.mode))
        manifest.entries.append(ManifestEntry(noisy_path, DomainKind.NOISY, args.mode))
        manifest.header[f"params_{index:03d}"] = json.dumps(params.model_dump(), sort_keys=True)

    ManifestRepository().save(manifest, out / MANIFEST_NAME)
    logger.info("synth_finished", out=str(out), pairs=args.count, mode=args.mode.value)
    print(out / MANIFEST_NAME)
    return 0
