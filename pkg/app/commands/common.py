"""
Helpers shared by the CLI commands
"""
import argparse
from pathlib import Path

from app.core.config import Settings
from app.core.errors import PipelineSizeError
from app.core.logging import get_logger
from app.domain.models import DomainKind, MultiBandRaster, NoiseMode
from app.repositories.manifest_repository import ManifestRepository
from app.services.raster_io import read_raster

logger = get_logger(__name__)


def add_mode_argument(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--mode",
        type=NoiseMode,
        choices=list(NoiseMode),
        metavar="{stripe,wave}",
        required=required,
        help="Noise family: stripe or wave",
    )


def load_manifest_scenes(
    path: Path,
    domain: DomainKind,
    mode: NoiseMode,
    settings: Settings,
) -> tuple[list[MultiBandRaster], list[str]]:
    """
    Read every raster of one domain and mode listed in a manifest

    Args:
        path: Manifest file
        domain: Domain tag to select
        mode: Mode tag to select
        settings: Supplies the declared data range

    Returns:
        (rasters, provenance ids)
    """
    entries = ManifestRepository().load(path).select(domain, mode)
    if not entries:
        raise PipelineSizeError(f"{path}: no {domain.value}/{mode.value} entries")
    scenes = [read_raster(entry.path, settings.data_range) for entry in entries]
    logger.info("manifest_scenes_loaded", manifest=str(path), domain=domain.value, scenes=len(scenes))
    return scenes, [entry.path.name for entry in entries]
