"""Timing utility for the verification pipeline."""

from contextlib import contextmanager
from typing import Iterator

from .logger import Logger


class PipelineTimer:
    """Measures the battery and its items."""

    def __init__(self, logger: Logger):
        """Initialize timer with a logger instance."""
        self.logger = logger

    @contextmanager
    def pipeline(self, description: str) -> Iterator[None]:
        """Context manager for timing an entire pipeline."""
        with self.logger.timing(description):
            yield

    def log_processing_stats(self, operation: str, trials: int, margin: float):
        """Log trial statistics for one battery item."""
        self.logger.debug(f"{operation} - ran {trials} trials, extreme margin {margin:.6g}")
