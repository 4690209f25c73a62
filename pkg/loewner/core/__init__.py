"""Core functionality for Loewner."""

from .battery import PaperBattery
from .search import SearchRunner

# Public API - only expose what CLI needs
__all__ = ["PaperBattery", "SearchRunner"]
