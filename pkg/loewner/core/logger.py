"""Centralized logger for Loewner."""

from contextlib import contextmanager
from time import perf_counter

from rich.console import Console

# stderr keeps stdout free for JSON reports
console = Console(stderr=True)


class Logger:
    """Handles all logging for the application."""

    def __init__(self, verbose: bool = False, quiet: bool = False):
        """Initialize logger with verbosity level."""
        self.verbose = verbose
        self.quiet = quiet

    def info(self, message: str):
        """Log informational messages."""
        if not self.quiet:
            console.print(message)

    def debug(self, message: str):
        """Log debug messages if verbose is enabled."""
        if self.verbose:
            console.print(f"[dim]{message}[/dim]")

    def warning(self, message: str):
        """Log warnings."""
        console.print(f"[yellow]Warning:[/yellow] {message}")

    def error(self, message: str):
        """Log error messages."""
        console.print(f"[red]Error:[/red] {message}")

    @contextmanager
    def timing(self, description: str):
        """
        Context manager for timing blocks of code.

        Args:
            description: Description of the timed block.
        """
        if not self.verbose:
            yield
            return

        start_time = perf_counter()
        self.debug(f"Starting: {description}...")
        yield
        duration = perf_counter() - start_time
        self.debug(f"Finished: {description} in {duration:.2f}s")
