"""Version tags for the annotated listing.

A tag is a path of components. A component is an int, or a symbolic
string such as ``k``, ``k+1`` (inside a loop family) or ``K+1`` (the value
before a loop ran many times). ``{k}``, ``{k,0}`` and ``{k,0,0}`` are the
same tag: trailing zeros are dropped on construction.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

Component = Union[int, str]

_SYM = re.compile(r"^([A-Za-z]+)(?:\+(\d+))?$")


def _bump_component(c: Component, by: int = 1) -> Component:
    if isinstance(c, int):
        return c + by
    m = _SYM.match(c)
    if not m:
        raise ValueError(f"bad symbolic tag component {c!r}")
    base, off = m.group(1), int(m.group(2) or 0) + by
    return base if off == 0 else f"{base}+{off}"


def _ckey(c: Component) -> tuple:
    if isinstance(c, int):
        return (0, c, "")
    m = _SYM.match(c)
    # lower-case symbols sort before the capital outside-loop marker
    return (1 if m.group(1).islower() else 2, int(m.group(2) or 0), m.group(1))


@dataclass(frozen=True, order=False)
class VersionTag:
    path: tuple[Component, ...] = (0,)

    def __post_init__(self):
        p = tuple(self.path)
        while len(p) > 1 and p[-1] == 0:
            p = p[:-1]
        if not p:
            p = (0,)
        object.__setattr__(self, "path", p)

    @staticmethod
    def of(*components: Component) -> "VersionTag":
        return VersionTag(tuple(components))

    def next(self) -> "VersionTag":
        """The version before one more change (backward order)."""
        return VersionTag(self.path[:-1] + (_bump_component(self.path[-1]),))

    def split(self, b: int) -> "VersionTag":
        """Branch ``b`` of a backward split: ``{k} -> {k,0}`` / ``{k,1}``."""
        if b not in (0, 1):
            raise ValueError("split branch must be 0 or 1")
        return VersionTag(self.path + (b,))

    def sort_key(self) -> tuple:
        return tuple(_ckey(c) for c in self.path)

    def __lt__(self, other: "VersionTag") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if len(self.path) == 1:
            return str(self.path[0])
        return "{" + ",".join(str(c) for c in self.path) + "}"


def format_tags(tags: Iterable[VersionTag]) -> str:
    """``{0}``, ``{{1,1},2}``: the brace-wrapped, sorted set of a variable's tags."""
    uniq = sorted(set(tags), key=VersionTag.sort_key)
    return "{" + ",".join(str(t) for t in uniq) + "}"


def next_of(tags: Iterable[VersionTag]) -> VersionTag:
    """Next version after a merged set: one past the largest leading component."""
    tags = list(tags)
    if len(tags) == 1:
        return tags[0].next()
    heads = [t.path[0] for t in tags]
    ints = [h for h in heads if isinstance(h, int)]
    syms = [h for h in heads if not isinstance(h, int)]
    if syms:
        return VersionTag((_bump_component(max(syms, key=_ckey)),))
    return VersionTag((max(ints) + 1,))


__all__ = ["VersionTag", "Component", "format_tags", "next_of"]
