"""Timing utilities for monitoring."""
import logging
import time
from contextlib import contextmanager
from typing import Iterator

logger = logging.getLogger(__name__)


class Elapsed:
    """Wall-clock duration of a timed block, filled in when the block exits."""

    def __init__(self) -> None:
        self.seconds = 0.0

    @property
    def ms(self) -> float:
        return self.seconds * 1000.0


@contextmanager
def timer(label: str) -> Iterator[Elapsed]:
    """
    Context manager for timing a block.

    Args:
        label: Description of the operation

    Yields:
        An Elapsed holder whose value is set on exit
    """
    elapsed = Elapsed()
    start = time.perf_counter()
    try:
        yield elapsed
    finally:
        elapsed.seconds = time.perf_counter() - start
        logger.debug("[TIMING] %s: %.3fs", label, elapsed.seconds)
