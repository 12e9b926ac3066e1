"""Exact probability tables for the two shuffles (Code 7 and Code 8).

``down`` picks pos in [0, i] for i = n-1 .. 1, ``up`` for i = 1 .. n-1;
both then swap x[pos] and x[i]. Because pos is uniform and independent of
the array, the element-by-position marginals update linearly, so the
tables are exact rationals.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

DIRECTIONS = ("down", "up")
MAX_ENUM = 7


def swap_order(n: int, direction: str) -> list:
    if direction == "down":
        return list(range(n - 1, 0, -1))
    if direction == "up":
        return list(range(1, n))
    raise ValueError(f"direction must be one of {DIRECTIONS}")


@dataclass
class ProbabilityMatrix:
    """rows are elements, columns are positions."""
    rows: list

    @property
    def n(self) -> int:
        return len(self.rows)

    def doubly_stochastic(self) -> bool:
        n = self.n
        if any(v < 0 for row in self.rows for v in row):
            return False
        return (all(sum(row) == 1 for row in self.rows)
                and all(sum(self.rows[r][c] for r in range(n)) == 1 for c in range(n)))

    def uniform(self) -> bool:
        return all(v == Fraction(1, self.n) for row in self.rows for v in row)

    def text(self) -> list:
        return [[str(v) for v in row] for row in self.rows]

    def to_csv(self) -> str:
        head = "element," + ",".join(f"pos{c}" for c in range(self.n))
        lines = [head] + [f"{r}," + ",".join(str(v) for v in row) for r, row in enumerate(self.rows)]
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return isinstance(other, ProbabilityMatrix) and self.rows == other.rows


def identity(n: int) -> ProbabilityMatrix:
    return ProbabilityMatrix([[Fraction(int(r == c)) for c in range(n)] for r in range(n)])


def apply_swap(mat: ProbabilityMatrix, i: int) -> ProbabilityMatrix:
    """One step: pos uniform in [0, i], then swap positions pos and i."""
    k = Fraction(1, i + 1)
    rows = []
    for row in mat.rows:
        new = list(row)
        head = sum(row[:i + 1], Fraction(0))
        new[i] = head * k
        for p in range(i):
            new[p] = row[p] * (1 - k) + row[i] * k
        rows.append(new)
    return ProbabilityMatrix(rows)


def shuffle_steps(n: int, direction: str = "down") -> list:
    """Matrices before the first swap and after each swap."""
    if n < 1:
        raise ValueError("n must be positive")
    mats = [identity(n)]
    for i in swap_order(n, direction):
        mats.append(apply_swap(mats[-1], i))
    return mats


def shuffle_matrix(n: int, steps: int, direction: str = "down") -> ProbabilityMatrix:
    if steps < 0 or steps > max(n - 1, 0):
        raise ValueError("steps must be in [0, n-1]")
    return shuffle_steps(n, direction)[steps]


def run_script(n: int, direction: str, script) -> tuple:
    """The permutation one rng script produces, starting from 0..n-1."""
    x = list(range(n))
    for i, pos in zip(swap_order(n, direction), script):
        x[i], x[pos] = x[pos], x[i]
    return tuple(x)


def scripts(n: int, direction: str):
    """Every choice sequence: pos ranges over [0, i] at each step."""
    return itertools.product(*(range(i + 1) for i in swap_order(n, direction)))


def shuffle_enumerate(n: int, direction: str = "down", max_n: int = MAX_ENUM) -> Counter:
    """permutation -> number of scripts that produce it."""
    if n > max_n:
        raise ValueError(f"n={n} exceeds the enumeration limit {max_n}")
    return Counter(run_script(n, direction, s) for s in scripts(n, direction))


def enumerated_matrix(n: int, steps: int, direction: str = "down") -> ProbabilityMatrix:
    """Element-position frequencies over all scripts truncated to ``steps`` swaps."""
    order = swap_order(n, direction)[:steps]
    counts = [[0] * n for _ in range(n)]
    total = 0
    for s in itertools.product(*(range(i + 1) for i in order)):
        x = list(range(n))
        for i, pos in zip(order, s):
            x[i], x[pos] = x[pos], x[i]
        for p, e in enumerate(x):
            counts[e][p] += 1
        total += 1
    return ProbabilityMatrix([[Fraction(c, total) for c in row] for row in counts])


def inverse_script(n: int, direction: str, script) -> tuple:
    """Replaying the swaps in reverse order undoes the shuffle."""
    x = list(run_script(n, direction, script))
    for i, pos in reversed(list(zip(swap_order(n, direction), script))):
        x[i], x[pos] = x[pos], x[i]
    return tuple(x)


TABLE1 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
TABLE2 = [[Fraction(2, 3), 0, Fraction(1, 3)],
          [0, Fraction(2, 3), Fraction(1, 3)],
          [Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)]]
TABLE4 = [[Fraction(1, 3)] * 3 for _ in range(3)]


def report(n: int = 3, steps: int | None = None, direction: str = "down",
           enum_max: int = 6) -> dict:
    steps = max(n - 1, 0) if steps is None else steps
    mat = shuffle_matrix(n, steps, direction)
    checks = {
        "table1": shuffle_matrix(3, 0).rows == TABLE1,
        "table2": shuffle_matrix(3, 1).rows == TABLE2,
        "table4": shuffle_matrix(3, 2).rows == TABLE4,
        "doubly_stochastic": all(m.doubly_stochastic()
                                 for d in DIRECTIONS for k in range(1, enum_max + 1)
                                 for m in shuffle_steps(k, d)),
        "matches_enumeration": mat == enumerated_matrix(n, steps, direction)
        if n <= MAX_ENUM else True,
    }
    for d in DIRECTIONS:
        ok = True
        for k in range(1, enum_max + 1):
            c = shuffle_enumerate(k, d)
            ok &= len(c) == math.factorial(k) and set(c.values()) == {1}
        checks[f"uniform_{d}"] = ok
    return {
        "case": "shuffle",
        "n": n,
        "steps": steps,
        "direction": direction,
        "matrix": mat.text(),
        "checks": checks,
        "passed": all(checks.values()),
    }


__all__ = [
    "DIRECTIONS", "swap_order", "ProbabilityMatrix", "identity", "apply_swap",
    "shuffle_steps", "shuffle_matrix", "run_script", "scripts", "shuffle_enumerate",
    "enumerated_matrix", "inverse_script", "TABLE1", "TABLE2", "TABLE4", "report",
]
