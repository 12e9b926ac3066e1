"""Step-count model of the triangular search structure (Code 15).

Memory locations sit in a triangle: level l (1-based) holds l nodes and
node k of level l has parents k-1 and k on the level above. A node is
marked when it holds t or a parent is marked, so a match marks a downward
cone whose footprint on the last level is a run of length L - l + 1
starting at k. Reading that run back gives (l, k) and so the position.

The triangle is padded to L(L+1)/2 nodes; padding nodes only pass marks
along. In ``strict`` mode the first and last node of each level only
propagate, as the printed listing does; matches there are missed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def levels_for(n: int) -> int:
    """Smallest L with L(L+1)/2 >= n."""
    if n <= 0:
        return 0
    L = math.isqrt(2 * n)
    while L * (L + 1) // 2 < n:
        L += 1
    while L > 1 and (L - 1) * L // 2 >= n:
        L -= 1
    return L


def position(level: int, k: int) -> int:
    """Flat index of node k (0-based) on a 1-based level."""
    return level * (level - 1) // 2 + k


def coords(pos: int) -> tuple:
    level = levels_for(pos + 1)
    return level, pos - position(level, 0)


@dataclass
class SearchTrace:
    n: int
    t: int
    levels: int
    marks: list  # per level, a bool array of length level
    leaf_runs: list  # (start, end) inclusive runs of marked last-level nodes
    decoded: list  # positions decoded from the runs
    matches: list  # true match positions (linear scan)
    steps: int
    ambiguous: bool = False
    strict: bool = False
    missed: list = field(default_factory=list)  # matches not among the decoded positions

    @property
    def step_bound(self) -> int:
        return 2 * math.ceil(math.sqrt(2 * self.n)) + self.levels


def _runs(row: np.ndarray) -> list:
    idx = np.flatnonzero(row)
    if not len(idx):
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([idx[0]], idx[breaks + 1]))
    ends = np.concatenate((idx[breaks], [idx[-1]]))
    return list(zip(starts.tolist(), ends.tolist()))


def cone_marks(L: int, apexes: Sequence[tuple]) -> list:
    """Marks produced by the given (level, k) apexes alone."""
    marks = [np.zeros(l, dtype=bool) for l in range(1, L + 1)]
    for level, k in apexes:
        for l in range(level, L + 1):
            marks[l - 1][k:k + (l - level) + 1] = True
    return marks


def search_sim(values: Sequence[int], t: int, strict: bool = False) -> SearchTrace:
    vals = np.asarray(values)
    n = len(vals)
    if n == 0:
        raise ValueError("values must be nonempty")
    L = levels_for(n)
    padded = np.full(L * (L + 1) // 2, False)
    padded[:n] = vals == t
    marks = []
    prev = np.zeros(0, dtype=bool)
    for level in range(1, L + 1):
        lo = position(level, 0)
        hit = padded[lo:lo + level].copy()
        if strict and level > 1:
            hit[0] = hit[-1] = False
        row = hit
        if level > 1:
            row = row.copy()
            row[1:] |= prev  # parent k-1
            row[:-1] |= prev  # parent k
        marks.append(row)
        prev = row
    runs = _runs(marks[-1])
    apexes = [(L - (e - s), s) for s, e in runs]
    decoded = [position(l, k) for l, k in apexes]
    matches = np.flatnonzero(vals == t).tolist()
    missed = [m for m in matches if m not in decoded]
    expected = cone_marks(L, apexes)
    ambiguous = (len(matches) > 1 or any(d >= n for d in decoded)
                 or any(not np.array_equal(a, b) for a, b in zip(expected, marks)))
    # one step per level of propagation, one per leaf read, one to decode
    steps = L + L + 1
    return SearchTrace(n, t, L, [m.tolist() for m in marks], runs, decoded, matches, steps,
                       ambiguous, strict, missed)


def decoder_table(L: int) -> list:
    """Last-level run (start, length) -> source position, for every node."""
    out = []
    for level in range(1, L + 1):
        for k in range(level):
            out.append({"position": position(level, k), "level": level, "k": k,
                        "run_start": k, "run_length": L - level + 1})
    return out


def random_single_match(n: int, rng: np.random.Generator) -> tuple:
    """Distinct-ish values with t placed exactly once."""
    values = rng.integers(0, 1 << 30, size=n)
    pos = int(rng.integers(0, n))
    t = int(values[pos])
    values[(values == t)] = t + 1
    values[pos] = t
    return values, t, pos


def report(n: int = 15, seed: int = 0, trials: int = 0, max_n: int = 10_000,
           strict: bool = False) -> dict:
    rng = np.random.default_rng(seed)
    values, t, pos = random_single_match(n, rng)
    tr = search_sim(values, t, strict)
    checks = {"decoded": tr.decoded == tr.matches, "steps": tr.steps <= tr.step_bound,
              "levels": tr.levels == levels_for(n)}
    if trials:
        bad = 0
        for _ in range(trials):
            m = int(rng.integers(1, max_n + 1))
            v, tt, p = random_single_match(m, rng)
            q = search_sim(v, tt)
            bad += q.decoded != [p] or q.steps > q.step_bound
        checks["random"] = bad == 0
    return {"case": "searchsim", "n": n, "seed": seed, "t": t, "position": pos,
            "levels": tr.levels, "steps": tr.steps, "step_bound": tr.step_bound,
            "leaf_runs": [list(r) for r in tr.leaf_runs], "decoded": tr.decoded,
            "strict": strict, "missed": tr.missed,
            "checks": checks, "passed": all(checks.values())}


__all__ = ["levels_for", "position", "coords", "SearchTrace", "cone_marks", "search_sim",
           "decoder_table", "random_single_match", "report"]
