"""Binary search (Code 4) read backward through the distance u - l.

Backward, the halving step ``m = (l+u)/2`` followed by ``l = m`` or
``u = m`` turns a distance d into one of 2d-1 (l moved), 2d (either) or
2d+1 (u moved). Starting from d = 1, where every entered loop ends, the
graph reaches every distance, so every size > 2 has a history.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..constraint.solve import solve_center_equation

EITHER, L_MOVED, U_MOVED = "either", "l", "u"


# -- distance graph -------------------------------------------------------

def successors(d: int) -> dict:
    """Backward successors of distance ``d`` with the variable that moved."""
    out = {2 * d: EITHER, 2 * d + 1: U_MOVED}
    if 2 * d - 1 > 1:  # a predecessor must still satisfy u - l > 1
        out[2 * d - 1] = L_MOVED
    return dict(sorted(out.items()))


def forward_step(d: int) -> dict:
    """Forward distances after one loop pass from distance d > 1."""
    half = d // 2
    out: dict = {}
    out.setdefault(d - half, set()).add(L_MOVED)  # l = m
    out.setdefault(half, set()).add(U_MOVED)  # u = m
    return out


@dataclass
class DistanceGraph:
    max_size: int
    edges: dict  # d -> {d': label}
    depth: dict  # BFS distance from d = 1

    @property
    def nodes(self) -> list:
        return sorted(self.depth)

    def size_of(self, d: int) -> int:
        return d + 1

    def reachable(self, size: int) -> bool:
        return (size - 1) in self.depth

    def path_length(self, size: int) -> Optional[int]:
        return self.depth.get(size - 1)

    def to_dot(self, nodes: Optional[set] = None) -> str:
        keep = set(self.nodes) if nodes is None else set(nodes)
        lines = ["digraph distances {", "  rankdir=TB;"]
        for d in sorted(keep):
            lines.append(f'  d{d} [label="{d}"];')
        for d in sorted(keep):
            for e, lab in self.edges.get(d, {}).items():
                if e in keep:
                    lines.append(f'  d{d} -> d{e} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def binsearch_graph(max_size: int) -> DistanceGraph:
    """Distances 1..max_size-1 (sizes up to ``max_size``), built backward from 1."""
    if max_size < 3:
        raise ValueError("max_size must be at least 3")
    top = max_size - 1
    edges, depth = {}, {1: 0}
    queue = deque([1])
    while queue:
        d = queue.popleft()
        edges[d] = {e: lab for e, lab in successors(d).items() if e <= top}
        for e in edges[d]:
            if e not in depth:
                depth[e] = depth[d] + 1
                queue.append(e)
    return DistanceGraph(max_size, edges, depth)


def fixed_subgraph(size: int) -> dict:
    """Distances a run of the given size can pass through, with backward labels.

    Returns {d: {d_prev: label}}: the part of the graph that stays live once
    ``size`` is known.
    """
    start = size - 1
    if start < 1:
        return {}
    nodes, stack = {start}, [start]
    while stack:
        d = stack.pop()
        if d > 1:
            for e in forward_step(d):
                if e not in nodes:
                    nodes.add(e)
                    stack.append(e)
    sub = {d: {} for d in nodes}
    for d in nodes:
        for e, lab in successors(d).items():
            if e in nodes:
                sub[d][e] = lab
    return sub


def fixed_subgraph_dot(size: int) -> str:
    sub = fixed_subgraph(size)
    lines = [f'digraph size{size} {{', "  rankdir=TB;"]
    for d in sorted(sub):
        lines.append(f'  d{d} [label="{d}"];')
        for e, lab in sorted(sub[d].items()):
            lines.append(f'  d{d} -> d{e} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def center_solutions(p):
    """q with p == (p + q) / 2: ``q = p`` or ``q = p + 1``."""
    return solve_center_equation(p)


def center_brute(limit: int = 256) -> set:
    """Offsets q - p observed for p == (p + q) // 2 over [0, limit]^2."""
    return {q - p for p in range(limit + 1) for q in range(limit + 1) if (p + q) // 2 == p}


# -- concrete probes ------------------------------------------------------

STATE_TEXT = {
    1: "found, t in x",
    2: "not found, t in x",
    3: "found, t not in x",
    4: "not found, t not in x",
}


@dataclass
class Probe:
    x: tuple
    t: int
    size: int
    result: Optional[int]  # returned index or -1; None when an out-of-bounds read stopped it
    loop_entered: bool
    l_out: int
    u_out: int
    oob: list = field(default_factory=list)  # indices read outside the array
    reads: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.result is not None and self.result >= 0

    @property
    def t_in_x(self) -> bool:
        return self.t in self.x[:max(self.size, 0)]

    @property
    def state(self) -> int:
        if self.found:
            return 1 if self.t_in_x else 3
        return 2 if self.t_in_x else 4


def binsearch_probe(x: Sequence[int], t: int, size: Optional[int] = None,
                    order: str = "ul") -> Probe:
    """Run Code 4 on ``x``; reads outside ``x`` are recorded, not raised.

    ``order="lu"`` tests ``x[l]`` before ``x[u]``, the hazardous variant.
    An out-of-bounds read stops the run with ``result=None``.
    """
    x = tuple(x)
    size = len(x) if size is None else size
    reads, oob = [], []

    def read(i):
        reads.append(i)
        if not 0 <= i < len(x):
            oob.append(i)
            return None
        return x[i]

    l, u = 0, size - 1
    entered = False
    while u - l > 1:
        entered = True
        m = (l + u) // 2
        v = read(m)
        if v is None:
            return Probe(x, t, size, None, entered, l, u, oob, reads)
        if v < t:
            l = m
        else:
            u = m
    for pos in ((u, l) if order == "ul" else (l, u)):
        v = read(pos)
        if v is None:
            return Probe(x, t, size, None, entered, l, u, oob, reads)
        if v == t:
            return Probe(x, t, size, pos, entered, l, u, oob, reads)
    return Probe(x, t, size, -1, entered, l, u, oob, reads)


def replace_at_u(p: Probe) -> Optional[Probe]:
    """Put t at u_out after a miss; the comparisons along the way are unchanged."""
    if p.found or not p.loop_entered or p.result is None:
        return None
    x = list(p.x)
    x[p.u_out] = p.t
    return binsearch_probe(x, p.t, p.size)


def sorted_state_census(max_n: int = 6, values: range = range(10)) -> dict:
    """State counts over every sorted array (length 1..max_n) and every t."""
    counts = {k: 0 for k in STATE_TEXT}
    for n in range(1, max_n + 1):
        for x in itertools.combinations_with_replacement(values, n):
            for t in values:
                counts[binsearch_probe(x, t).state] += 1
    return counts


def unsorted_witness(values: range = range(4), n: int = 3) -> Optional[Probe]:
    """An unsorted array where t is found anyway (state 1)."""
    for x in itertools.product(values, repeat=n):
        if list(x) == sorted(x):
            continue
        for t in values:
            p = binsearch_probe(x, t)
            if p.state == 1 and p.loop_entered:
                return p
    return None


def unsorted_miss_witness(values: range = range(4), n: int = 4) -> Optional[Probe]:
    """An unsorted array where t is present but missed (state 2)."""
    for x in itertools.product(values, repeat=n):
        if list(x) == sorted(x):
            continue
        for t in values:
            p = binsearch_probe(x, t)
            if p.state == 2:
                return p
    return None


@dataclass
class BoundaryCase:
    size: int
    l_out: int
    u_out: int
    returns: list  # distinct results over small arrays
    oob_reads: bool
    note: str


def binsearch_boundaries(values: range = range(3)) -> list:
    """Sizes 2, 1, 0 and -1: the cases that never enter the loop.

    Arrays are drawn from ``values``; for sizes <= 0 the buffer still holds
    one element, so the x[0] check has something to read.
    """
    out = []
    for size, note in ((2, "returns 0, 1 or -1 by membership"),
                       (1, "returns 0 or -1"),
                       (0, "reads x[u] with u < 0 before x[l]"),
                       (-1, "reads x[u] with u < 0 before x[l]")):
        results, oob = set(), False
        length = max(size, 1)
        for x in itertools.product(values, repeat=length):
            for t in values:
                p = binsearch_probe(x, t, size)
                results.add("oob" if p.result is None else p.result)
                oob |= bool(p.oob)
        out.append(BoundaryCase(size, 0, size - 1, sorted(results, key=str), oob, note))
    return out


def order_hazard(values: range = range(3)) -> dict:
    """With x[l] tested first, size <= 0 runs can look successful.

    Returns, per order, how many size-0 probes report a hit without any
    out-of-bounds read.
    """
    quiet = {}
    for order in ("ul", "lu"):
        n = 0
        for x in itertools.product(values, repeat=1):
            for t in values:
                p = binsearch_probe(x, t, 0, order)
                if p.found and not p.oob:
                    n += 1
        quiet[order] = n
    return quiet


def report(max_size: int = 1000, census_n: int = 6) -> dict:
    g = binsearch_graph(max_size)
    unreachable = [s for s in range(3, max_size + 1) if not g.reachable(s)]
    too_long = [s for s in range(3, max_size + 1)
                if g.reachable(s) and g.path_length(s) > (s - 1).bit_length() + 1]
    census = sorted_state_census(census_n)
    wit = unsorted_witness()
    checks = {
        "successors_1": successors(1) == {2: EITHER, 3: U_MOVED},
        "successors_2": successors(2) == {3: L_MOVED, 4: EITHER, 5: U_MOVED},
        "all_reachable": not unreachable,
        "path_lengths": not too_long,
        "center": set(center_solutions(7)) == {7, 8} and center_brute() == {0, 1},
        "sorted_states_1_4_only": census[2] == 0 and census[3] == 0,
        "unsorted_witness": wit is not None,
        "size_le_0_oob": all(b.oob_reads for b in binsearch_boundaries() if b.size <= 0),
    }
    return {
        "case": "binsearch",
        "successors": {str(d): {str(k): v for k, v in successors(d).items()} for d in (1, 2)},
        "max_size": max_size,
        "unreachable": unreachable,
        "census": {str(k): v for k, v in census.items()},
        "unsorted_witness": None if wit is None else {"x": list(wit.x), "t": wit.t,
                                                      "result": wit.result},
        "boundaries": [{"size": b.size, "l_out": b.l_out, "u_out": b.u_out,
                        "returns": [str(r) for r in b.returns], "oob": b.oob_reads,
                        "note": b.note} for b in binsearch_boundaries()],
        "order_hazard": order_hazard(),
        "fixed_subgraph_12": {str(d): {str(k): v for k, v in sorted(e.items())}
                              for d, e in sorted(fixed_subgraph(12).items())},
        "checks": checks,
        "passed": all(checks.values()),
    }


__all__ = [
    "successors", "forward_step", "DistanceGraph", "binsearch_graph", "fixed_subgraph",
    "fixed_subgraph_dot", "center_solutions", "center_brute", "Probe", "STATE_TEXT",
    "binsearch_probe", "replace_at_u", "sorted_state_census", "unsorted_witness",
    "unsorted_miss_witness", "BoundaryCase", "binsearch_boundaries", "order_hazard", "report",
]
