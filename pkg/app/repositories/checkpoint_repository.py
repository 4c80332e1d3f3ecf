"""
WCKP checkpoint repository
"""
import json
import struct
from pathlib import Path

import numpy as np

from app.core.errors import CheckpointFormatError
from app.core.logging import get_logger
from app.domain.models import Checkpoint
from app.repositories.base import BaseFileRepository

logger = get_logger(__name__)

MAGIC = b"WCKP"


class CheckpointRepository(BaseFileRepository[Checkpoint]):
    """
    Binary layout (little-endian):
        "WCKP", u32 tensor count,
        per tensor: u16 name length, name bytes, u8 rank, u32 dims[rank], f32 payload,
        u32 config length, UTF-8 JSON config echo
    """

    def encode(self, obj: Checkpoint) -> bytes:
        chunks = [MAGIC, struct.pack("<I", len(obj.tensors))]
        for name, value in obj.tensors.items():
            encoded = name.encode("utf-8")
            array = np.ascontiguousarray(value, dtype="<f4")
            chunks.append(struct.pack("<H", len(encoded)))
            chunks.append(encoded)
            chunks.append(struct.pack(f"<B{array.ndim}I", array.ndim, *array.shape))
            chunks.append(array.tobytes())
        text = json.dumps(obj.config, sort_keys=True).encode("utf-8")
        chunks.append(struct.pack("<I", len(text)))
        chunks.append(text)
        return b"".join(chunks)

    def decode(self, data: bytes, path: Path) -> Checkpoint:
        pos = 0

        def take(size: int, what: str) -> bytes:
            nonlocal pos
            if pos + size > len(data):
                raise CheckpointFormatError(f"{path}: truncated {what} at byte {pos}")
            chunk = data[pos : pos + size]
            pos += size
            return chunk

        if take(4, "magic") != MAGIC:
            raise CheckpointFormatError(f"{path}: not a WCKP checkpoint")
        (count,) = struct.unpack("<I", take(4, "tensor count"))
        tensors: dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", take(2, "name length"))
            try:
                name = take(name_len, "name").decode("utf-8")
            except UnicodeDecodeError as e:
                raise CheckpointFormatError(f"{path}: tensor name is not UTF-8 at byte {pos}") from e
            if name in tensors:
                raise CheckpointFormatError(f"{path}: duplicate tensor '{name}'")
            (rank,) = struct.unpack("<B", take(1, "rank"))
            dims = struct.unpack(f"<{rank}I", take(4 * rank, "dims"))
            size = int(np.prod(dims, dtype=np.int64))
            payload = take(4 * size, f"payload of '{name}'")
            tensors[name] = np.frombuffer(payload, dtype="<f4").reshape(dims).astype(np.float32)
        (text_len,) = struct.unpack("<I", take(4, "config length"))
        try:
            config = json.loads(take(text_len, "config").decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise CheckpointFormatError(f"{path}: config echo is not valid JSON") from e
        if pos != len(data):
            raise CheckpointFormatError(f"{path}: {len(data) - pos} trailing bytes")
        return Checkpoint(tensors=tensors, config=config)

    def save(self, obj: Checkpoint, path: Path) -> Path:
        written = super().save(obj, path)
        logger.info("checkpoint_saved", path=str(written), tensors=len(obj.tensors))
        return written
