"""
Dataset manifest repository

A manifest is UTF-8 text: `# key: value` header lines, then one
`path<TAB>domain<TAB>mode` line per raster. Relative paths resolve against the
manifest's directory.
"""
from pathlib import Path

from app.core.errors import ConfigError
from app.core.logging import get_logger
from app.domain.models import DomainKind, Manifest, ManifestEntry, NoiseMode
from app.repositories.base import BaseFileRepository

logger = get_logger(__name__)


class ManifestRepository(BaseFileRepository[Manifest]):
    """Reads and writes tab-separated dataset manifests"""

    def encode(self, obj: Manifest) -> bytes:
        lines = [f"# {key}: {value}" for key, value in obj.header.items()]
        for entry in obj.entries:
            lines.append(f"{entry.path.as_posix()}\t{entry.domain.value}\t{entry.mode.value}")
        return ("\n".join(lines) + "\n").encode("utf-8")

    def decode(self, data: bytes, path: Path) -> Manifest:
        manifest = Manifest()
        base = Path(path).parent
        for number, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].partition(":")
                if sep:
                    manifest.header[key.strip()] = value.strip()
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ConfigError(f"{path}:{number}: expected path, domain and mode separated by tabs")
            try:
                domain, mode = DomainKind(fields[1].strip()), NoiseMode(fields[2].strip())
            except ValueError as e:
                raise ConfigError(f"{path}:{number}: {e}") from e
            entry_path = Path(fields[0].strip())
            if not entry_path.is_absolute():
                entry_path = base / entry_path
            manifest.entries.append(ManifestEntry(entry_path, domain, mode))
        logger.debug("manifest_loaded", path=str(path), entries=len(manifest.entries))
        return manifest
