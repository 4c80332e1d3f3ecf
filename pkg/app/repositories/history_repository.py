"""
Loss-history CSV repository
"""
import csv
import io
from pathlib import Path

from app.core.errors import ConfigError
from app.repositories.base import BaseFileRepository

HISTORY_COLUMNS = ("iteration", "gan_g", "gan_f", "d_x", "d_y", "cycle", "identity", "lr")

History = list[dict[str, float]]


class HistoryRepository(BaseFileRepository[History]):
    """One CSV row per recorded training iteration"""

    def encode(self, obj: History) -> bytes:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=HISTORY_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in obj:
            values = {key: float(row[key]) for key in HISTORY_COLUMNS}
            values["iteration"] = int(row["iteration"])
            writer.writerow(values)
        return buffer.getvalue().encode("utf-8")

    def decode(self, data: bytes, path: Path) -> History:
        reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
        if tuple(reader.fieldnames or ()) != HISTORY_COLUMNS:
            raise ConfigError(f"{path}: unexpected history columns {reader.fieldnames}")
        return [
            {key: int(row[key]) if key == "iteration" else float(row[key]) for key in HISTORY_COLUMNS}
            for row in reader
        ]
