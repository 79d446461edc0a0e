"""Symbolic invariants of non-reduced spaces with smooth reduction {w = 0}."""

__version__ = "0.1.0"
