"""
`train`: unpaired CycleGAN training from dataset manifests
"""
import argparse
from pathlib import Path

from app.commands.common import add_mode_argument, load_manifest_scenes
from app.core.config import Settings
from app.core.logging import get_logger
from app.domain.models import DomainKind
from app.repositories.base import read_bytes
from app.repositories.checkpoint_repository import CheckpointRepository
from app.repositories.history_repository import HistoryRepository
from app.schemas.training import TrainConfig
from app.services.training import build_stores, train

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("train", help="Train a stripe or wave model")
    parser.add_argument("--config", type=Path, default=None, help="Flat JSON training config")
    add_mode_argument(parser, required=False)
    parser.add_argument("--clean-manifest", type=Path, required=True)
    parser.add_argument("--noisy-manifest", type=Path, required=True)
    parser.add_argument("--out", type=Path, required=True, help="Checkpoint path (.wckp)")
    parser.add_argument("--history", type=Path, default=None, help="Loss CSV (defaults next to the checkpoint)")
    parser.add_argument("--resume", type=Path, default=None, help="Checkpoint to continue from")
    parser.set_defaults(handler=handle)


def load_config(args: argparse.Namespace, settings: Settings) -> TrainConfig:
    """Config file, then --mode, then the process seed (--seed or WAVCYCLE_SEED)

    An explicit --seed beats the file; the environment seed only fills a file
    that names none.
    """
    data = {}
    if args.config is not None:
        data = TrainConfig.model_validate_json(read_bytes(args.config)).model_dump(by_alias=True, exclude_unset=True)
    if args.mode is not None:
        data["mode"] = args.mode
    if args.seed is not None or "seed" not in data:
        data["seed"] = settings.seed
    return TrainConfig.model_validate(data)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    cfg = load_config(args, settings)
    logger.info("train_config_resolved", **cfg.to_file_dict())

    clean, clean_ids = load_manifest_scenes(args.clean_manifest, DomainKind.CLEAN, cfg.mode, settings)
    noisy, noisy_ids = load_manifest_scenes(args.noisy_manifest, DomainKind.NOISY, cfg.mode, settings)
    stores = build_stores(cfg, clean, noisy, clean_ids, noisy_ids)

    repository = CheckpointRepository()
    resume = repository.load(args.resume) if args.resume is not None else None
    ckpt = train(cfg, stores, threads=settings.threads, serial=settings.serial, resume=resume)

    repository.save(ckpt, args.out)
    history_path = args.history or args.out.with_suffix(".csv")
    HistoryRepository().save(ckpt.history, history_path)
    print(args.out)
    return 0
