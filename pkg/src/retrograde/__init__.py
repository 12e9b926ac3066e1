"""Retrograde (backward-in-time) program analysis toolkit."""

__version__ = "0.1.0"
