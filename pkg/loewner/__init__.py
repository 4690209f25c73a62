"""Loewner: certified checkers for matrix monotone and matrix convex functions of several variables."""

__version__ = "0.1.0"
