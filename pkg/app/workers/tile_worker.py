"""
Worker pool for per-tile generator inference
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from app.core.logging import get_logger

logger = get_logger(__name__)


class TileWorker:
    """Maps a function over tiles, preserving tile order"""

    def __init__(self, threads: int = 1):
        """
        Initialize tile worker

        Args:
            threads: Worker threads; 1 runs inline
        """
        self.threads = max(int(threads), 1)

    def map(self, fn: Callable[[np.ndarray], np.ndarray], tiles: Sequence[np.ndarray]) -> list[np.ndarray]:
        """
        Apply `fn` to every tile

        Parameters are only read during inference, so tiles may run
        concurrently; results come back in input order.

        Args:
            fn: Per-tile function
            tiles: Input tiles

        Returns:
            Outputs in tile order
        """
        if self.threads == 1 or len(tiles) < 2:
            results = [fn(tile) for tile in tiles]
        else:
            with ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="tile") as pool:
                results = list(pool.map(fn, tiles))
        logger.debug("tile_inference_finished", tiles=len(tiles), threads=self.threads)
        return results


# Global worker instances, one per thread count
_workers: dict[int, TileWorker] = {}


def get_tile_worker(threads: int = 1) -> TileWorker:
    """
    Get shared tile worker instance

    Args:
        threads: Worker threads

    Returns:
        TileWorker instance
    """
    threads = max(int(threads), 1)
    if threads not in _workers:
        _workers[threads] = TileWorker(threads)
    return _workers[threads]
