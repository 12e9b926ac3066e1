"""In-place permutation inversion (Code 13), two marking schemes.

The array is 1-indexed as in the listing: slot 0 is unused. Visited
slots are marked either by negation or by setting bit 31 (the ``xor``
variant on unsigned 32-bit values). The touch counter counts slot visits
that follow a pointer (``p = x[p]`` at the loop head and ``v = x[p]``
inside the cycle walk); each slot is met at most twice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

MASK = 0x80000000
VARIANTS = ("negate", "xor")


class NotAPermutation(ValueError):
    """Code 13 assumes a permutation of 1..n; other inputs are outside its contract."""


@njit(cache=True)
def _invert_negate(x, size):
    touches = 0
    p = 1
    while p <= size:
        hv = p
        p = x[p]
        touches += 1
        if not (p < 0):
            while True:
                v = x[p]
                touches += 1
                x[p] = -hv
                hv = p
                p = v
                if x[p] < 0:
                    break
        x[hv] = -x[hv]
        p = hv + 1
    return touches


@njit(cache=True)
def _invert_xor(x, size):
    touches = 0
    mask = np.uint32(0x80000000)
    p = np.uint32(1)
    while p <= size:
        hv = p
        p = x[p]
        touches += 1
        if (p & mask) == 0:
            while True:
                v = x[p]
                touches += 1
                x[p] = hv ^ mask
                hv = p
                p = v
                if (x[p] & mask) != 0:
                    break
        x[hv] = x[hv] ^ mask
        p = hv + np.uint32(1)
    return touches


def validate(x) -> None:
    """Raise NotAPermutation unless x[1..n] is a permutation of 1..n."""
    a = np.asarray(x)
    body = a[1:]
    n = len(body)
    if n == 0:
        return
    if body.min() < 1 or body.max() > n:
        raise NotAPermutation("values must lie in 1..n")
    if np.bincount(body.astype(np.int64), minlength=n + 1)[1:].max() != 1:
        raise NotAPermutation("values must be distinct")


@dataclass
class Inversion:
    result: np.ndarray  # 1-indexed, slot 0 as given
    touches: int
    variant: str

    @property
    def n(self) -> int:
        return len(self.result) - 1


def invert_permutation(x, variant: str = "negate", check: bool = True) -> Inversion:
    """Invert a 1-indexed permutation in place (on a copy) and count touches."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if check:
        validate(x)
    src = np.asarray(x)
    if variant == "negate":
        a = src.astype(np.int64, copy=True)
        touches = _invert_negate(a, len(a) - 1)
    else:
        if len(src) > 1 and src[1:].max() >= MASK:
            raise NotAPermutation("xor variant needs values below 2^31")
        a = src.astype(np.uint32, copy=True)
        touches = _invert_xor(a, np.uint32(len(a) - 1))
    return Inversion(a, int(touches), variant)


def naive_inverse(x) -> np.ndarray:
    """y[x[i]] = i with a scratch array."""
    a = np.asarray(x, dtype=np.int64)
    y = np.zeros_like(a)
    y[a[1:]] = np.arange(1, len(a))
    y[0] = a[0] if len(a) else 0
    return y


def one_indexed(perm) -> np.ndarray:
    """Prefix an unused slot 0 to a 1-based permutation."""
    return np.concatenate(([0], np.asarray(perm, dtype=np.int64)))


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    return one_indexed(rng.permutation(n) + 1)


def report(n: int = 10, seed: int = 0, trials: int = 20) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    ok_inv = ok_var = ok_twice = True
    example = None
    for _ in range(trials):
        x = random_permutation(n, rng)
        a = invert_permutation(x, "negate")
        b = invert_permutation(x, "xor")
        ok_inv &= bool(np.array_equal(a.result, naive_inverse(x)))
        ok_var &= bool(np.array_equal(a.result, b.result.astype(np.int64)))
        ok_twice &= bool(np.array_equal(invert_permutation(a.result).result, x))
        worst = max(worst, a.touches / max(n, 1))
        if example is None:
            example = {"x": x[1:].tolist(), "inverse": a.result[1:].tolist(),
                       "touches": a.touches}
    checks = {"matches_naive": ok_inv, "variants_agree": ok_var, "involution": ok_twice,
              "touches_le_2n": worst <= 2}
    return {"case": "invperm", "n": n, "seed": seed, "trials": trials,
            "max_touches_per_n": worst, "example": example if n <= 20 else None,
            "checks": checks, "passed": all(checks.values())}


__all__ = ["MASK", "VARIANTS", "NotAPermutation", "validate", "Inversion",
           "invert_permutation", "naive_inverse", "one_indexed", "random_permutation", "report"]
