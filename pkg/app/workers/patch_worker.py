"""
Background worker prefetching training patches
"""
import queue
import threading
from typing import Callable, Generic, Iterator, Optional, TypeVar

from app.core.logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")

_DONE = object()


class PatchPrefetcher(Generic[T]):
    """
    Draws items on one producer thread ahead of the consumer

    A single producer calls `draw` sequentially, so the item sequence is the
    same as drawing inline; only the timing changes.
    """

    def __init__(self, draw: Callable[[], T], total: int, depth: int = 4):
        """
        Initialize the prefetcher

        Args:
            draw: Produces the next item (owns its random generators)
            total: Number of items to produce
            depth: Queue capacity
        """
        self.draw = draw
        self.total = total
        self.queue: queue.Queue = queue.Queue(maxsize=max(depth, 1))
        self.running = False
        self._thread: Optional[threading.Thread] = None
        self._error: Optional[BaseException] = None

    def start(self) -> None:
        """Start the producer thread"""
        self.running = True
        self._thread = threading.Thread(target=self._produce, name="patch-prefetch", daemon=True)
        self._thread.start()
        logger.debug("prefetch_started", total=self.total, depth=self.queue.maxsize)

    def stop(self) -> None:
        """Stop the producer and drain the queue"""
        self.running = False
        while self._thread is not None and self._thread.is_alive():
            try:
                self.queue.get_nowait()
            except queue.Empty:
                pass
            self._thread.join(timeout=0.05)
        self._thread = None
        logger.debug("prefetch_stopped")

    def _produce(self) -> None:
        try:
            for _ in range(self.total):
                if not self.running:
                    return
                self._put(self.draw())
        except BaseException as e:
            self._error = e
        self._put(_DONE)

    def _put(self, item: object) -> None:
        while self.running:
            try:
                self.queue.put(item, timeout=0.1)
                return
            except queue.Full:
                continue

    def __iter__(self) -> Iterator[T]:
        if self._thread is None:
            self.start()
        try:
            while True:
                item = self.queue.get()
                if item is _DONE:
                    if self._error is not None:
                        raise self._error
                    return
                yield item
        finally:
            self.stop()


def iterate_patches(draw: Callable[[], T], total: int, prefetch: bool) -> Iterator[T]:
    """
    Yield `total` draws, on a prefetch thread when `prefetch` is set

    Args:
        draw: Item producer
        total: Number of items
        prefetch: Use a background producer

    Returns:
        Iterator over the drawn items
    """
    if prefetch:
        return iter(PatchPrefetcher(draw, total))
    return (draw() for _ in range(total))
