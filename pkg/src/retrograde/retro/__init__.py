"""Backward analysis: the engine, annotated listings, recording mode and reports."""
from .engine import *  # noqa: F401,F403
from .engine import __all__ as _engine_all
from .annotate import annotate
from .record import BackStep, Recording, record_and_reverse
from .tags import VersionTag, format_tags

__all__ = list(_engine_all) + [
    "annotate", "BackStep", "Recording", "record_and_reverse", "VersionTag", "format_tags",
]
