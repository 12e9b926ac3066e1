"""Maximum contiguous sum (Code 14) with forward and backward split scans.

The forward scan resets its running sum when it drops to 0 or below; the
index where that happens is a forward split and the next index starts a
segment (an alpha position). The same scan run right to left gives the
backward splits, and each backward segment starts at its right end (a beta
position). A maxsum range starts at an alpha and ends at a beta, and it
never contains a forward split, so only ranges inside one forward segment
need checking.

Ties between equal sums go to the earliest start, then the shortest range.
The empty sub-array (sum 0) is allowed, as in Code 14.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


def code14(a: Sequence[int]) -> int:
    """The listing as written."""
    max_res = 0
    y = 0
    for v in a:
        y = y + v
        if y > 0:
            if max_res < y:
                max_res = y
        else:
            y = 0
    return max_res


def _better(s, rng, best, best_rng) -> bool:
    if s != best:
        return s > best
    if best_rng is None:
        return True
    return (rng[0], rng[1] - rng[0]) < (best_rng[0], best_rng[1] - best_rng[0])


def oracle(a: Sequence[int]) -> tuple:
    """Every range's sum at once; (sum, (i, j)) or (0, None)."""
    n = len(a)
    if n == 0:
        return 0, None
    P = np.concatenate(([0], np.cumsum(np.asarray(a, dtype=np.int64))))
    sums = P[None, 1:] - P[:-1, None]  # sums[i, j] = a[i..j]
    sums[np.tril_indices(n, -1)] = np.iinfo(np.int64).min
    best = int(sums.max())
    if best <= 0:
        return 0, None
    i, j = np.argwhere(sums == best)[0]  # row-major: earliest start, then shortest
    return best, (int(i), int(j))


def forward_scan(a: Sequence[int]) -> tuple:
    """(max, range, split indices) of the left-to-right scan."""
    best, best_rng = 0, None
    y, start = 0, 0
    splits = []
    for i, v in enumerate(a):
        y += v
        if y > 0:
            if _better(y, (start, i), best, best_rng):
                best, best_rng = y, (start, i)
        else:
            y = 0
            splits.append(i)
            start = i + 1
    return best, best_rng, splits


def backward_splits(a: Sequence[int]) -> list:
    y = 0
    splits = []
    for i in range(len(a) - 1, -1, -1):
        y += a[i]
        if y <= 0:
            y = 0
            splits.append(i)
    return sorted(splits)


@dataclass
class MaxsumReport:
    array: list
    value: int
    range: Optional[tuple]
    forward_splits: list
    backward_splits: list
    alpha: list  # segment starts of the forward scan
    beta: list  # segment starts (right ends) of the backward scan
    # ``range`` is the alpha..beta range; the oracle's tie rule may pick an
    # earlier start through a zero-sum stretch
    candidates: list = field(default_factory=list)  # (i, j, sum)
    scan_value: int = 0
    candidate_value: int = 0
    oracle_value: int = 0
    oracle_range: Optional[tuple] = None

    @property
    def agree(self) -> bool:
        return self.scan_value == self.candidate_value == self.oracle_value == self.value

    def split_inside(self) -> bool:
        """True if a forward split lies strictly inside the maxsum range."""
        if self.range is None:
            return False
        i, j = self.range
        return any(i <= s < j for s in self.forward_splits)


def candidate_scan(a: Sequence[int], fsplits: list, bsplits: list) -> tuple:
    n = len(a)
    alpha = [0] + [s + 1 for s in fsplits if s + 1 < n] if n else []
    beta = sorted({n - 1} | {s - 1 for s in bsplits if s >= 1}) if n else []
    bounds = alpha + [n]
    prefix = np.concatenate(([0], np.cumsum(np.asarray(a, dtype=np.int64)))) if n else np.zeros(1)
    cands = []
    for k in range(len(alpha)):
        lo, hi = bounds[k], bounds[k + 1] - 1
        for b in beta:
            if lo <= b <= hi:
                cands.append((lo, b, int(prefix[b + 1] - prefix[lo])))
    best, best_rng = 0, None
    for i, j, s in cands:
        if s > 0 and _better(s, (i, j), best, best_rng):
            best, best_rng = s, (i, j)
    return best, best_rng, alpha, beta, cands


def maxsum_analyze(a: Sequence[int], with_oracle: bool = True) -> MaxsumReport:
    a = [int(v) for v in a]
    scan, _, fs = forward_scan(a)
    bs = backward_splits(a)
    cval, crng, alpha, beta, cands = candidate_scan(a, fs, bs)
    oval, orng = oracle(a) if with_oracle else (cval, crng)
    return MaxsumReport(a, cval, crng, fs, bs, alpha, beta, cands, scan, cval, oval, orng)


# -- two dimensions -------------------------------------------------------

FIG28 = [[10, 10, 10, 10], [10, -1, -5, -5], [10, -7, 2, 2], [10, -7, 2, 2]]


@dataclass
class Maxsum2D:
    value: int
    box: tuple  # (r0, c0, r1, c1) inclusive
    negative_l: Optional[tuple]  # (cells, sum) of the most negative inner L-shape
    negative_box: Optional[tuple]  # (box, sum) of the most negative inner sub-matrix


def _box_sum(P, r0, c0, r1, c1) -> int:
    return int(P[r1 + 1, c1 + 1] - P[r0, c1 + 1] - P[r1 + 1, c0] + P[r0, c0])


def maxsum_2d_demo(m, max_dim: int = 8) -> Maxsum2D:
    """Brute force over all sub-matrices, then look inside the winner."""
    A = np.asarray(m, dtype=np.int64)
    R, C = A.shape
    if R > max_dim or C > max_dim:
        raise ValueError(f"matrix larger than {max_dim}x{max_dim}")
    P = np.zeros((R + 1, C + 1), dtype=np.int64)
    P[1:, 1:] = A.cumsum(0).cumsum(1)
    boxes = [(r0, c0, r1, c1) for r0 in range(R) for r1 in range(r0, R)
             for c0 in range(C) for c1 in range(c0, C)]
    best = max(boxes, key=lambda b: (_box_sum(P, *b), (b[2] - b[0] + 1) * (b[3] - b[1] + 1)))
    value = _box_sum(P, *best)
    r0, c0, r1, c1 = best
    inner = [b for b in boxes if r0 <= b[0] and b[2] <= r1 and c0 <= b[1] and b[3] <= c1
             and b != best]
    neg_box = min(((b, _box_sum(P, *b)) for b in inner), key=lambda t: t[1], default=None)
    # L-shapes: an inner box minus a smaller box sharing its bottom-right corner
    neg_l = None
    for b in inner:
        for s in inner:
            if s[2] == b[2] and s[3] == b[3] and s != b and s[0] >= b[0] and s[1] >= b[1]:
                total = _box_sum(P, *b) - _box_sum(P, *s)
                if neg_l is None or total < neg_l[1]:
                    cells = [(r, c) for r in range(b[0], b[2] + 1) for c in range(b[1], b[3] + 1)
                             if not (r >= s[0] and c >= s[1])]
                    neg_l = (tuple(cells), total)
    if neg_box is not None and neg_box[1] >= 0:
        neg_box = None
    if neg_l is not None and neg_l[1] >= 0:
        neg_l = None
    return Maxsum2D(value, best, neg_l, neg_box)


def report(a: Sequence[int], random_trials: int = 0, seed: int = 0) -> dict:
    r = maxsum_analyze(a)
    checks = {"agree": r.agree, "no_split_inside": not r.split_inside(),
              "code14": code14(a) == r.value}
    if random_trials:
        rng = np.random.default_rng(seed)
        bad = 0
        for _ in range(random_trials):
            arr = rng.integers(-100, 101, size=int(rng.integers(0, 201))).tolist()
            q = maxsum_analyze(arr)
            bad += (not q.agree) or q.split_inside() or code14(arr) != q.value
        checks["random"] = bad == 0
    return {
        "case": "maxsum",
        "array": r.array,
        "maxsum": r.value,
        "range": list(r.range) if r.range else None,
        "forward_splits": r.forward_splits,
        "backward_splits": r.backward_splits,
        "alpha": r.alpha,
        "beta": r.beta,
        "candidates": [list(c) for c in r.candidates],
        "oracle": r.oracle_value,
        "seed": seed,
        "checks": checks,
        "passed": all(checks.values()),
    }


__all__ = ["code14", "oracle", "forward_scan", "backward_splits", "MaxsumReport",
           "candidate_scan", "maxsum_analyze", "FIG28", "Maxsum2D", "maxsum_2d_demo", "report"]
