"""Worked analyses of five algorithms, each checked against an independent oracle."""
from . import binsearch, invperm, maxsum, searchsim, shuffle

CASES = ("binsearch", "shuffle", "invperm", "maxsum", "searchsim")

__all__ = ["binsearch", "shuffle", "invperm", "maxsum", "searchsim", "CASES"]
