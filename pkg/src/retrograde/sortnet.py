"""Comparator networks, verified forward and backward.

Forward checks run the network on every permutation (n!) or every bit
vector (2^n, the zero-one principle). Backward checks start from sorted
outputs and push them right-to-left through the comparators. Seen
backward, a comparator whose output pair is in order could have received
either order (split), an equal pair has one predecessor (copy), and an
out-of-order pair cannot come out of a comparator at all (destroy).

Wire 0 is the top wire; after a comparator the top value is the smaller.
Vectors print with wire 0 first, so ``011`` has a 0 on wire 0.
"""
from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

MAX_ZERO_ONE = 24
MAX_SINGLE = 10
MAX_EQUIV = 6
DEFAULT_FRONTIER = 4_000_000

MODES = ("bits", "distinct", "marked")


class NetworkError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class Comparator:
    i: int
    j: int
    stage: int = 0


@dataclass(frozen=True)
class Network:
    wires: int
    comparators: tuple = ()

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Comparator) else Comparator(*c) for c in self.comparators)
        object.__setattr__(self, "comparators", comps)
        if self.wires < 1:
            raise NetworkError("a network needs at least one wire")
        prev_stage, used = None, set()
        for c in comps:
            if not (0 <= c.i < c.j < self.wires):
                raise NetworkError(f"bad comparator ({c.i},{c.j}) on {self.wires} wires")
            if prev_stage is not None and c.stage < prev_stage:
                raise NetworkError("stage indices must be non-decreasing")
            if c.stage != prev_stage:
                used = set()
            if c.i in used or c.j in used:
                raise NetworkError(f"stage {c.stage} touches wire twice")
            used |= {c.i, c.j}
            prev_stage = c.stage

    @staticmethod
    def from_pairs(wires: int, pairs: Iterable[Sequence[int]]) -> "Network":
        """Assign stages greedily: a new stage opens when a wire is reused."""
        comps, stage, used = [], 0, set()
        for i, j in pairs:
            if i > j:
                i, j = j, i
            if i in used or j in used:
                stage += 1
                used = set()
            used |= {i, j}
            comps.append(Comparator(i, j, stage))
        return Network(wires, tuple(comps))

    @property
    def m(self) -> int:
        return len(self.comparators)

    @property
    def depth(self) -> int:
        return len({c.stage for c in self.comparators})

    def pairs(self) -> list:
        return [(c.i, c.j) for c in self.comparators]

    def without(self, index: int) -> "Network":
        return Network.from_pairs(self.wires, [p for k, p in enumerate(self.pairs()) if k != index])

    def format(self) -> str:
        lines = [f"wires {self.wires}"]
        lines += [f"stage {c.stage}: {c.i} {c.j}" for c in self.comparators]
        return "\n".join(lines) + "\n"


_STAGE = re.compile(r"^stage\s+(\d+)\s*:\s*(\d+)\s+(\d+)$")


def parse_network(text: str) -> Network:
    """Read the ``wires N`` / ``stage S: i j`` format; ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line))
    if not rows:
        raise NetworkError("empty network file")
    lineno, head = rows[0]
    m = re.match(r"^wires\s+(\d+)$", head)
    if not m:
        raise NetworkError(f"line {lineno}: expected 'wires N'")
    comps = []
    for lineno, line in rows[1:]:
        m2 = _STAGE.match(line)
        if not m2:
            raise NetworkError(f"line {lineno}: expected 'stage S: i j'")
        s, i, j = map(int, m2.groups())
        if i >= j:
            raise NetworkError(f"line {lineno}: top wire must be above bottom wire (i < j)")
        comps.append(Comparator(i, j, s))
    try:
        return Network(int(m.group(1)), tuple(comps))
    except NetworkError as e:
        raise NetworkError(f"{e}") from None


def load_network(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


# -- values ---------------------------------------------------------------

@dataclass(frozen=True)
class Marked:
    """A key with an origin mark; comparators look at the key only."""
    key: int
    mark: int = 0

    def __str__(self):
        return f"{self.key}^{self.mark}"


@dataclass(frozen=True)
class ValueVec:
    values: tuple
    mode: str = "distinct"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "bits" and any(v not in (0, 1) for v in self.values):
            raise ValueError("bits mode takes 0/1 entries")
        if self.mode == "distinct" and sorted(self.values) != list(range(len(self.values))):
            raise ValueError("distinct mode takes a permutation of 0..n-1")
        if self.mode == "marked" and not all(isinstance(v, Marked) for v in self.values):
            raise ValueError("marked mode takes Marked entries")

    @staticmethod
    def bits(text: str) -> "ValueVec":
        return ValueVec(tuple(int(ch) for ch in text), "bits")

    def __len__(self):
        return len(self.values)

    def __str__(self):
        return fmt_state(self.values)


def fmt_state(state: Sequence) -> str:
    if all(isinstance(v, int) and 0 <= v <= 9 for v in state):
        return "".join(str(v) for v in state)
    return "(" + ",".join(str(v) for v in state) + ")"


def _key(v):
    return v.key if isinstance(v, Marked) else v


def unmark(state: Sequence) -> tuple:
    return tuple(_key(v) for v in state)


def _values(v) -> tuple:
    return v.values if isinstance(v, ValueVec) else tuple(v)


# -- forward --------------------------------------------------------------

def sort_forward(net: Network, v) -> tuple:
    """Run the network; the smaller key ends on the top wire."""
    vals = list(_values(v))
    if len(vals) != net.wires:
        raise NetworkError(f"vector of width {len(vals)} on a {net.wires}-wire network")
    for c in net.comparators:
        a, b = vals[c.i], vals[c.j]
        if _key(a) > _key(b):
            vals[c.i], vals[c.j] = b, a
    return tuple(vals)


def _sorted(state) -> bool:
    return all(_key(state[k]) <= _key(state[k + 1]) for k in range(len(state) - 1))


def _bit_state(x: int, n: int) -> tuple:
    return tuple((x >> (n - 1 - w)) & 1 for w in range(n))


def _bit_index(state: Sequence[int]) -> int:
    x = 0
    for b in state:
        x = (x << 1) | b
    return x


@dataclass
class CheckResult:
    passed: bool
    method: str
    cases: int
    witnesses: list = field(default_factory=list)  # (input, output) pairs that fail

    def __bool__(self):
        return self.passed


def verify_forward(net: Network, max_n: int = 8, witnesses: int = 4) -> CheckResult:
    """Brute force over all n! permutations of 0..n-1."""
    n = net.wires
    if n > max_n:
        raise BudgetError(f"n={n} exceeds the permutation limit {max_n}")
    bad = []
    for perm in itertools.permutations(range(n)):
        out = sort_forward(net, perm)
        if not _sorted(out):
            bad.append((perm, out))
            if len(bad) >= witnesses:
                break
    return CheckResult(not bad, "forward", math.factorial(n), bad)


def verify_zero_one(net: Network, max_n: int = MAX_ZERO_ONE, witnesses: int = 4) -> CheckResult:
    """All 2^n bit vectors at once, one packed bit plane per wire.

    On bits, min is AND and max is OR, so a comparator is two array ops.
    """
    n = net.wires
    if n > max_n:
        raise BudgetError(f"n={n} exceeds the zero-one limit {max_n}")
    total = 1 << n
    idx = np.arange(total, dtype=np.uint32)
    planes = [np.packbits(((idx >> (n - 1 - w)) & 1).astype(np.uint8)) for w in range(n)]
    del idx
    for c in net.comparators:
        a, b = planes[c.i], planes[c.j]
        planes[c.i], planes[c.j] = a & b, a | b
    bad = np.zeros_like(planes[0])
    for w in range(n - 1):
        bad |= planes[w] & ~planes[w + 1]
    flags = np.unpackbits(bad)[:total]
    hits = np.flatnonzero(flags)[:witnesses]
    wit = []
    for x in hits.tolist():
        v = _bit_state(x, n)
        wit.append((v, sort_forward(net, v)))
    return CheckResult(not len(hits), "zero-one", total, wit)


# -- backward -------------------------------------------------------------

@dataclass(frozen=True)
class StageEvents:
    """One backward step: comparator ``index`` applied to a frontier."""
    k: int
    index: int
    comparator: Comparator
    before: int
    destroyed: int
    copied: int
    split: int
    split4: int
    duplicates: int  # states produced twice within the step
    after: int

    @property
    def impossible(self) -> int:
        # a destroyed state had two potential predecessors, both gone
        return 2 * self.destroyed

    @property
    def repeated(self) -> int:
        # a copy is two potential predecessors that coincide
        return self.copied + self.duplicates

    @property
    def d(self) -> int:
        """2 s_{k-1} - s_k; equals impossible + repeated outside marked mode."""
        return 2 * self.before - self.after


@dataclass
class RetroResult:
    network: Network
    output: ValueVec
    mode: str
    predecessors: frozenset
    stages: list
    truncated: bool = False

    @property
    def d_profile(self) -> list:
        """d_1..d_k in backward order (d_1 belongs to the last comparator)."""
        return [s.d for s in self.stages]

    @property
    def sizes(self) -> list:
        """s_0..s_k."""
        return [1] + [s.after for s in self.stages]

    def identity(self) -> tuple:
        """(2^m - |preds|, sum over k of 2^k d_{m-k})."""
        m = len(self.stages)
        d = self.d_profile
        rhs = sum((1 << k) * d[m - k - 1] for k in range(m))
        return (1 << m) - len(self.predecessors), rhs

    def totals(self) -> dict:
        keys = ("destroyed", "copied", "split", "split4", "duplicates")
        out = {k: sum(getattr(s, k) for s in self.stages) for k in keys}
        out["impossible"] = sum(s.impossible for s in self.stages)
        out["repeated"] = sum(s.repeated for s in self.stages)
        out["d"] = sum(self.d_profile)
        return out


def _as_output(out, mode: str) -> ValueVec:
    if isinstance(out, ValueVec):
        return out
    if isinstance(out, str):
        if mode != "bits":
            raise ValueError("string outputs are bit vectors")
        return ValueVec.bits(out)
    return ValueVec(tuple(out), mode)


def retro_predecessors(net: Network, out, mode: str | None = None,
                       budget: int = DEFAULT_FRONTIER) -> RetroResult:
    """All inputs the network could have turned into ``out``.

    ``mode`` defaults to the mode of a ValueVec ``out``, else ``bits``.
    ``marked`` mode replaces the copy on equal keys with the four-way
    splitter: both marks may have sat on either wire.
    """
    if mode is None:
        mode = out.mode if isinstance(out, ValueVec) else "bits"
    out = _as_output(out, mode)
    if out.mode != mode:
        out = ValueVec(out.values, mode)
    if len(out) != net.wires:
        raise NetworkError(f"vector of width {len(out)} on a {net.wires}-wire network")
    frontier = {out.values}
    stages = []
    truncated = False
    m = net.m
    for k, index in enumerate(range(m - 1, -1, -1), 1):
        c = net.comparators[index]
        destroyed = copied = split = split4 = produced = 0
        nxt = set()
        for st in frontier:
            a, b = st[c.i], st[c.j]
            ka, kb = _key(a), _key(b)
            if ka > kb:
                destroyed += 1
                continue
            if ka < kb:
                split += 1
                swapped = list(st)
                swapped[c.i], swapped[c.j] = b, a
                nxt.add(st)
                nxt.add(tuple(swapped))
                produced += 2
            elif mode == "marked" and a != b:
                split4 += 1
                for x, y in ((a, a), (b, b), (b, a), (a, b)):
                    s2 = list(st)
                    s2[c.i], s2[c.j] = x, y
                    nxt.add(tuple(s2))
                produced += 4
            else:
                copied += 1
                nxt.add(st)
                produced += 1
        stages.append(StageEvents(k, index, c, len(frontier), destroyed, copied, split,
                                  split4, produced - len(nxt), len(nxt)))
        frontier = nxt
        if len(frontier) > budget:
            truncated = True
            break
    return RetroResult(net, out, mode, frozenset(frontier), stages, truncated)


def base_outputs(n: int) -> list:
    """The n+1 sorted bit vectors 0...0, 0...01, ..., 1...1."""
    return [tuple([0] * (n - k) + [1] * k) for k in range(n + 1)]


@dataclass
class BaseReport:
    passed: bool
    sizes: list
    expected: list
    missing: list  # inputs no base output accounts for
    results: list

    def __bool__(self):
        return self.passed


def verify_retrograde_base(net: Network, max_n: int = MAX_ZERO_ONE) -> BaseReport:
    n = net.wires
    if n > max_n:
        raise BudgetError(f"n={n} exceeds the base-test limit {max_n}")
    results = [retro_predecessors(net, ValueVec(o, "bits"), "bits") for o in base_outputs(n)]
    sizes = [len(r.predecessors) for r in results]
    expected = [math.comb(n, k) for k in range(n + 1)]
    seen = set()
    overlap = False
    for r in results:
        if seen & r.predecessors:
            overlap = True
        seen |= r.predecessors
    missing = sorted((_bit_state(x, n) for x in range(1 << n)
                      if _bit_state(x, n) not in seen), key=_bit_index)
    ok = not overlap and not missing and sizes == expected and not any(r.truncated for r in results)
    return BaseReport(ok, sizes, expected, missing, results)


@dataclass
class SingleReport:
    passed: bool
    count: int
    expected: int
    identity_lhs: int
    identity_rhs: int
    missing: list  # unreachable permutations (a few)
    result: RetroResult

    @property
    def identity_holds(self) -> bool:
        return self.identity_lhs == self.identity_rhs

    def __bool__(self):
        return self.passed


def verify_single_test(net: Network, max_n: int = MAX_SINGLE, witnesses: int = 4) -> SingleReport:
    """One backward pass from 0,1,...,n-1; a sorter reaches all n! permutations."""
    n = net.wires
    if n > max_n:
        raise BudgetError(f"n={n} exceeds the single-test limit {max_n}")
    r = retro_predecessors(net, ValueVec(tuple(range(n)), "distinct"), "distinct")
    if r.truncated:
        raise BudgetError("frontier budget exceeded")
    expected = math.factorial(n)
    lhs, rhs = r.identity()
    missing = []
    if len(r.predecessors) != expected:
        for perm in itertools.permutations(range(n)):
            if perm not in r.predecessors:
                missing.append(perm)
                if len(missing) >= witnesses:
                    break
    ok = len(r.predecessors) == expected and lhs == rhs
    return SingleReport(ok, len(r.predecessors), expected, lhs, rhs, missing, r)


@dataclass
class EquivalenceReport:
    forward: bool
    zero_one: bool
    single: bool

    @property
    def agree(self) -> bool:
        return self.forward == self.zero_one == self.single

    @property
    def passed(self) -> bool:
        return self.agree and self.forward


def equivalence_check(net: Network) -> EquivalenceReport:
    if net.wires > MAX_EQUIV:
        raise BudgetError(f"n={net.wires} exceeds the equivalence limit {MAX_EQUIV}")
    return EquivalenceReport(verify_forward(net).passed, verify_zero_one(net).passed,
                             verify_single_test(net).passed)


# -- paths and clashes ----------------------------------------------------

@dataclass(frozen=True)
class Clash:
    """An input no sorted output accounts for, with what went wrong on its way."""
    input: tuple
    output: tuple
    inactive: tuple  # comparator indices where two tracked ones met
    paths: tuple  # wire sequence of each one, left to right
    meetings: tuple  # (path a, path b, comparator) for every overlap

    @property
    def kind(self) -> str:
        return "overlap" if self.inactive else "impossible"


@dataclass
class PathDiagram:
    network: Network
    reach: list  # reach[i][j]: some monotone path joins input i to output j
    clashes: list

    @property
    def connected(self) -> bool:
        return all(all(row) for row in self.reach)

    @property
    def excluded(self) -> list:
        return [c.input for c in self.clashes]


def path_reach(net: Network) -> list:
    """Input-to-output connectivity along paths that only move rightward.

    At a comparator a path may stay on its wire or take the comparator to
    the other wire.
    """
    n = net.wires
    reach = []
    for start in range(n):
        cur = {start}
        for c in net.comparators:
            if c.i in cur or c.j in cur:
                cur |= {c.i, c.j}
        reach.append([j in cur for j in range(n)])
    return reach


def _track_ones(net: Network, state: tuple):
    """Follow each 1 through the network; equal pairs leave tokens in place."""
    vals = list(state)
    token = {w: t for t, w in enumerate(w for w in range(len(state)) if state[w])}
    paths = [[w] for w in sorted(token, key=token.get)]
    inactive, meetings = [], []
    for idx, c in enumerate(net.comparators):
        a, b = vals[c.i], vals[c.j]
        if a == 1 and b == 1:
            inactive.append(idx)
            meetings.append((token[c.i], token[c.j], idx))
        elif a > b:
            vals[c.i], vals[c.j] = b, a
            t = token.pop(c.i)
            token[c.j] = t
            paths[t].append(c.j)
    for w, t in token.items():
        if paths[t][-1] != w:
            paths[t].append(w)
    return tuple(vals), tuple(inactive), tuple(tuple(p) for p in paths), tuple(meetings)


def clash_analysis(net: Network, max_n: int = 16) -> PathDiagram:
    """Path connectivity plus the exact set of excluded inputs.

    Excluded inputs come from the retrograde base pass, so they are exact;
    each one is annotated by tracking its ones forward.
    """
    if net.wires > max_n:
        raise BudgetError(f"n={net.wires} exceeds the clash limit {max_n}")
    base = verify_retrograde_base(net, max_n)
    clashes = []
    for x in base.missing:
        out, inactive, paths, meetings = _track_ones(net, x)
        clashes.append(Clash(x, out, inactive, paths, meetings))
    return PathDiagram(net, path_reach(net), clashes)


# -- corpus ---------------------------------------------------------------

def bubble(n: int) -> Network:
    return Network.from_pairs(n, [(j, j + 1) for i in range(n - 1, 0, -1) for j in range(i)])


def insertion(n: int) -> Network:
    return Network.from_pairs(n, [(j - 1, j) for i in range(1, n) for j in range(i, 0, -1)])


def odd_even_transposition(n: int) -> Network:
    pairs = []
    for r in range(n):
        pairs += [(j, j + 1) for j in range(r % 2, n - 1, 2)]
    return Network.from_pairs(n, pairs)


def _pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def _prune(n: int, pairs) -> Network:
    # padding wires hold +infinity at the bottom, so comparators touching them never act
    return Network.from_pairs(n, [(i, j) for i, j in pairs if j < n])


def batcher(n: int) -> Network:
    """Batcher's odd-even merge sort, built at a power of two then pruned."""
    p = _pow2(n)
    pairs = []
    k = 1
    while k < p:
        j = k
        while j >= 1:
            for i in range(j % k, p - j, 2 * j):
                for t in range(min(j, p - i - j)):
                    if (i + t) // (2 * k) == (i + t + j) // (2 * k):
                        pairs.append((i + t, i + t + j))
            j //= 2
        k *= 2
    return _prune(n, pairs)


def bitonic(n: int) -> Network:
    """Bitonic sorter with every comparator pointing the same way."""
    p = _pow2(n)
    pairs = []
    k = 2
    while k <= p:
        for i in range(0, p, k):
            for t in range(k // 2):
                pairs.append((i + t, i + k - 1 - t))
        j = k // 4
        while j >= 1:
            for i in range(0, p, 2 * j):
                for t in range(j):
                    pairs.append((i + t, i + t + j))
            j //= 2
        k *= 2
    return _prune(n, pairs)


def pairwise(n: int) -> Network:
    """Parberry's pairwise sorting network, pruned from a power of two."""
    p = _pow2(n)
    pairs = []
    a = 1
    while a < p:
        b, c = a, 0
        while b < p:
            pairs.append((b - a, b))
            b += 1
            c = (c + 1) % a
            if c == 0:
                b += a
        a *= 2
    a //= 4
    e = 1
    while a > 0:
        d = e
        while d > 0:
            b = (d + 1) * a
            c = 0
            while b < p:
                pairs.append((b - d * a, b))
                b += 1
                c = (c + 1) % a
                if c == 0:
                    b += a
            d //= 2
        a //= 2
        e = 2 * e + 1
    return _prune(n, pairs)


OPTIMAL = {
    3: [(0, 1), (1, 2), (0, 1)],
    4: [(0, 1), (2, 3), (0, 2), (1, 3), (1, 2)],
    5: [(0, 1), (3, 4), (2, 4), (2, 3), (1, 4), (0, 3), (0, 2), (1, 3), (1, 2)],
    6: [(1, 2), (4, 5), (0, 2), (3, 5), (0, 1), (3, 4), (2, 5), (0, 3), (1, 4),
        (2, 4), (1, 3), (2, 3)],
}


def optimal(n: int) -> Network:
    """Size-optimal networks for small n."""
    return Network.from_pairs(n, OPTIMAL[n])


NET3 = Network.from_pairs(3, OPTIMAL[3])
NET4 = Network.from_pairs(4, OPTIMAL[4])
NET4_BROKEN = NET4.without(4)
# every input wire reaches every output wire, yet 1100 ends unsorted: two ones
# meet at comparator 3 and it cannot act
NET4_CLASH = Network.from_pairs(4, [(0, 1), (2, 3), (0, 2), (1, 2), (2, 3)])

CONSTRUCTIONS = {
    "bubble": bubble,
    "insertion": insertion,
    "oddeven": odd_even_transposition,
    "batcher": batcher,
    "bitonic": bitonic,
    "pairwise": pairwise,
    "optimal": optimal,
}


def correct_corpus(sizes=range(3, 7)) -> dict:
    """Named sorting networks from standard constructions."""
    out = {}
    for n in sizes:
        for name, make in CONSTRUCTIONS.items():
            out[f"{name}{n}"] = make(n)
    return out


def mutate(net: Network, rng: random.Random) -> Network:
    """Drop, rewire, reverse or insert one comparator."""
    pairs = net.pairs()
    n = net.wires
    kind = rng.choice(("drop", "rewire", "swapnext", "insert"))
    if kind == "drop" and pairs:
        pairs.pop(rng.randrange(len(pairs)))
    elif kind == "rewire" and pairs:
        k = rng.randrange(len(pairs))
        i, j = rng.sample(range(n), 2)
        pairs[k] = (min(i, j), max(i, j))
    elif kind == "swapnext" and len(pairs) >= 2:
        k = rng.randrange(len(pairs) - 1)
        pairs[k], pairs[k + 1] = pairs[k + 1], pairs[k]
    else:
        i, j = rng.sample(range(n), 2)
        pairs.insert(rng.randrange(len(pairs) + 1), (min(i, j), max(i, j)))
    return Network.from_pairs(n, pairs)


def mutant_corpus(count: int = 50, seed: int = 0, broken_only: bool = True) -> list:
    """Seeded mutants of the correct corpus; by default only non-sorters are kept."""
    rng = random.Random(seed)
    bases = list(correct_corpus().values())
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > count * 100:
            raise RuntimeError("could not build enough mutants")
        net = mutate(rng.choice(bases), rng)
        if broken_only and verify_forward(net).passed:
            continue
        out.append(net)
    return out


# -- exports --------------------------------------------------------------

def network_dot(net: Network, highlight: Iterable[int] = ()) -> str:
    """Wires as horizontal chains, comparators as vertical edges."""
    hl = set(highlight)
    cols = {}
    lines = ["digraph network {", "  rankdir=LR;", "  node [shape=point];",
             "  edge [arrowhead=none];"]
    for w in range(net.wires):
        lines.append(f'  in{w} [shape=plaintext, label="{w}"];')
        cols[w] = f"in{w}"
    for k, c in enumerate(net.comparators):
        for w in (c.i, c.j):
            node = f"c{k}w{w}"
            lines.append(f"  {node};")
            lines.append(f"  {cols[w]} -> {node};")
            cols[w] = node
        color = "red" if k in hl else "black"
        lines.append(f'  c{k}w{c.i} -> c{k}w{c.j} [constraint=false, color={color}, '
                     f'label="{k}"];')
    for w in range(net.wires):
        lines.append(f'  out{w} [shape=plaintext, label="{w}"];')
        lines.append(f"  {cols[w]} -> out{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def path_dot(diagram: PathDiagram) -> str:
    """Inputs on the left, outputs on the right, an edge per connected pair."""
    n = diagram.network.wires
    lines = ["digraph paths {", "  rankdir=LR;"]
    for w in range(n):
        lines.append(f'  i{w} [label="in {w}"];')
        lines.append(f'  o{w} [label="out {w}"];')
    for i in range(n):
        for j in range(n):
            if diagram.reach[i][j]:
                lines.append(f"  i{i} -> o{j};")
    for c in diagram.clashes:
        label = f"{fmt_state(c.input)} -> {fmt_state(c.output)} ({c.kind})"
        lines.append(f'  // excluded {label}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def d_profile_csv(r: RetroResult) -> str:
    head = ("k,comparator,i,j,before,destroyed,copied,split,split4,duplicates,"
            "impossible,repeated,d,after")
    rows = [head]
    for s in r.stages:
        rows.append(",".join(str(x) for x in (
            s.k, s.index, s.comparator.i, s.comparator.j, s.before, s.destroyed, s.copied,
            s.split, s.split4, s.duplicates, s.impossible, s.repeated, s.d, s.after)))
    return "\n".join(rows) + "\n"


def stats(net: Network) -> dict:
    """Per-base-output frontier statistics and the single-test profile."""
    base = verify_retrograde_base(net)
    out = {
        "wires": net.wires,
        "comparators": net.m,
        "depth": net.depth,
        "base": [{"output": fmt_state(r.output.values), "size": len(r.predecessors),
                  "binomial": e, "d": r.d_profile}
                 for r, e in zip(base.results, base.expected)],
    }
    if net.wires <= MAX_SINGLE:
        s = verify_single_test(net)
        out["single"] = {"count": s.count, "expected": s.expected, "d": s.result.d_profile,
                         "identity": [s.identity_lhs, s.identity_rhs]}
    return out


__all__ = [
    "Comparator", "Network", "NetworkError", "BudgetError", "parse_network", "load_network",
    "Marked", "ValueVec", "fmt_state", "unmark", "sort_forward", "CheckResult",
    "verify_forward", "verify_zero_one", "StageEvents", "RetroResult", "retro_predecessors",
    "base_outputs", "BaseReport", "verify_retrograde_base", "SingleReport",
    "verify_single_test", "EquivalenceReport", "equivalence_check", "Clash", "PathDiagram",
    "path_reach", "clash_analysis", "bubble", "insertion", "odd_even_transposition",
    "batcher", "bitonic", "pairwise", "optimal", "OPTIMAL", "NET3", "NET4", "NET4_BROKEN",
    "NET4_CLASH",
    "CONSTRUCTIONS", "correct_corpus", "mutate", "mutant_corpus", "network_dot", "path_dot",
    "d_profile_csv", "stats",
]
