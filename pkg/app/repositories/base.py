"""
Base repository with generic, atomic file persistence
"""
import os
import tempfile
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Generic, TypeVar

from app.core.errors import NotFoundError, WriteError
from app.core.logging import get_logger

logger = get_logger(__name__)

ModelType = TypeVar("ModelType")


def read_bytes(path: Path) -> bytes:
    """
    Read a whole file

    Args:
        path: File path

    Returns:
        File contents
    """
    path = Path(path)
    if not path.is_file():
        raise NotFoundError(f"file not found: {path}")
    return path.read_bytes()


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """
    Write a file atomically: temp file in the same directory, then rename

    Args:
        path: Destination path
        data: File contents
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_name, path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
    except OSError as e:
        raise WriteError(f"cannot write {path}: {e}") from e
    logger.debug("file_written", path=str(path), size_bytes=len(data))


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


class BaseFileRepository(ABC, Generic[ModelType]):
    """Base repository mapping one object to one file"""

    @abstractmethod
    def encode(self, obj: ModelType) -> bytes:
        """Serialize an object to file contents"""

    @abstractmethod
    def decode(self, data: bytes, path: Path) -> ModelType:
        """Deserialize file contents"""

    def save(self, obj: ModelType, path: Path) -> Path:
        """
        Persist an object atomically

        Args:
            obj: Object to store
            path: Destination path

        Returns:
            The written path
        """
        path = Path(path)
        atomic_write_bytes(path, self.encode(obj))
        return path

    def load(self, path: Path) -> ModelType:
        """
        Load an object

        Args:
            path: Source path

        Returns:
            Decoded object
        """
        path = Path(path)
        return self.decode(read_bytes(path), path)

    def exists(self, path: Path) -> bool:
        return Path(path).is_file()
