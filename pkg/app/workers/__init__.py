"""Workers module - concurrent helpers for training and inference"""
from app.workers.patch_worker import PatchPrefetcher, iterate_patches
from app.workers.tile_worker import TileWorker, get_tile_worker

__all__ = ["PatchPrefetcher", "iterate_patches", "TileWorker", "get_tile_worker"]
