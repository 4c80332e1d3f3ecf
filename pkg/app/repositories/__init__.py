"""Repositories module - exports all repository classes"""
from app.repositories.base import BaseFileRepository, atomic_write_bytes, atomic_write_text, read_bytes
from app.repositories.checkpoint_repository import CheckpointRepository
from app.repositories.history_repository import HISTORY_COLUMNS, HistoryRepository
from app.repositories.manifest_repository import ManifestRepository

__all__ = [
    "BaseFileRepository",
    "read_bytes",
    "atomic_write_bytes",
    "atomic_write_text",
    "CheckpointRepository",
    "ManifestRepository",
    "HistoryRepository",
    "HISTORY_COLUMNS",
]
