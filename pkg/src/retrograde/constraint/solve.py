"""Decision procedures over conjunctions of :class:`Pred`.

``check`` is three-valued. Emptiness is only ever claimed from a proof
(constant folding, equality elimination, Fourier-Motzkin with integer
tightening, or an exact one-variable interval argument); non-emptiness
only from a concrete witness. Anything else is ``UNKNOWN``.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import ceil, floor, gcd, lcm
from typing import Iterable, Optional, Sequence

from .symbolic import (
    Op, Poly, Pred, Read, Unbound, Var, conj_arrays, conj_free_vars,
)

EMPTY = "empty"
NONEMPTY = "nonempty"
UNKNOWN = "unknown"

FM_LIMIT = 400
WITNESS_BOX = 8
WITNESS_SAMPLES = 2000


# -- linear views ----------------------------------------------------------

def _lin(p: Poly) -> tuple[dict, Fraction]:
    """Linear view where each non-constant monomial is its own unknown (a sound relaxation)."""
    coeffs = {}
    for m, c in p.terms.items():
        if m != ():
            coeffs[m] = c
    return coeffs, p.constant


def _tighten(coeffs: dict, const: Fraction) -> tuple[dict, Fraction]:
    """Scale ``sum <= -const`` to coprime integers and round the bound (all unknowns are integers)."""
    if not coeffs:
        return coeffs, const
    den = lcm(*(c.denominator for c in coeffs.values()), const.denominator)
    ints = {m: int(c * den) for m, c in coeffs.items()}
    k = const * den
    g = 0
    for c in ints.values():
        g = gcd(g, c)
    return {m: Fraction(c, g) for m, c in ints.items()}, Fraction(-((-k) // g))


def _eliminate_equalities(preds: Sequence[Pred], keep: frozenset = frozenset()):
    """Gaussian elimination of linear equalities (never pivoting on ``keep``).

    Returns (status, ineqs, neqs) where ineqs/neqs are linear views with the
    equalities substituted, or status EMPTY if a contradiction surfaced.
    """
    eqs = [_lin(p.poly) for p in preds if p.op == "=="]
    ineqs = [_lin(p.poly) for p in preds if p.op == "<="]
    neqs = [_lin(p.poly) for p in preds if p.op == "!="]
    while eqs:
        coeffs, const = eqs.pop()
        if not coeffs:
            if const != 0:
                return EMPTY, [], []
            continue
        cands = [m for m in coeffs if m not in keep]
        if not cands:
            ineqs.append((coeffs, const))
            ineqs.append(({m: -c for m, c in coeffs.items()}, -const))
            continue
        # prefer a unit coefficient, then the lexically first unknown
        piv = min(cands, key=lambda m: (abs(coeffs[m]) != 1, str(m)))
        a = coeffs[piv]
        # piv = -(rest + const)/a
        rest = {m: -c / a for m, c in coeffs.items() if m != piv}
        rconst = -const / a

        def sub(view, piv=piv, rest=rest, rconst=rconst):
            c, k = view
            if piv not in c:
                return view
            f = c[piv]
            out = {m: v for m, v in c.items() if m != piv}
            for m, v in rest.items():
                out[m] = out.get(m, 0) + f * v
            out = {m: v for m, v in out.items() if v != 0}
            return out, k + f * rconst

        eqs = [sub(e) for e in eqs]
        ineqs = [sub(e) for e in ineqs]
        neqs = [sub(e) for e in neqs]
        # an equality with non-integer constant over integer unknowns
        for c, k in eqs:
            if c and all(v.denominator == 1 for v in c.values()):
                g = 0
                for v in c.values():
                    g = gcd(g, int(v))
                if k.denominator != 1 or int(k) % g:
                    return EMPTY, [], []
    for c, k in neqs:
        if not c and k == 0:
            return EMPTY, [], []
    return None, ineqs, neqs


def fourier_motzkin(ineqs: list) -> Optional[bool]:
    """True if ``{sum(c*x) + k <= 0}`` is infeasible over the integers (sound), False if
    feasible over the rationals, None when the constraint budget is exhausted."""
    rows = []
    for c, k in ineqs:
        c, k = _tighten(dict(c), k)
        if not c:
            if k > 0:
                return True
            continue
        rows.append((c, k))
    while rows:
        unknowns = set()
        for c, _ in rows:
            unknowns |= set(c)
        if not unknowns:
            break
        # eliminate the unknown that creates the fewest new rows
        def cost(u):
            pos = sum(1 for c, _ in rows if c.get(u, 0) > 0)
            neg = sum(1 for c, _ in rows if c.get(u, 0) < 0)
            return pos * neg - pos - neg, str(u)
        u = min(unknowns, key=cost)
        pos = [(c, k) for c, k in rows if c.get(u, 0) > 0]
        neg = [(c, k) for c, k in rows if c.get(u, 0) < 0]
        keep = [(c, k) for c, k in rows if c.get(u, 0) == 0]
        new = []
        for cp, kp in pos:
            for cn, kn in neg:
                a, b = cp[u], -cn[u]
                c = {}
                for m in set(cp) | set(cn):
                    if m == u:
                        continue
                    v = b * cp.get(m, 0) + a * cn.get(m, 0)
                    if v != 0:
                        c[m] = v
                k = b * kp + a * kn
                c, k = _tighten(c, k)
                if not c:
                    if k > 0:
                        return True
                    continue
                new.append((c, k))
        rows = list({(tuple(sorted(((str(m), v) for m, v in c.items()))), k): (c, k)
                     for c, k in keep + new}.values())
        if len(rows) > FM_LIMIT:
            return None
    return False


def _single_var_decide(ineqs, neqs) -> Optional[str]:
    """Exact answer when at most one unknown remains and it is a plain variable."""
    unknowns = set()
    for c, _ in ineqs + neqs:
        unknowns |= set(c)
    if len(unknowns) > 1:
        return None
    if not unknowns:
        for _, k in ineqs:
            if k > 0:
                return EMPTY
        for _, k in neqs:
            if k == 0:
                return EMPTY
        return NONEMPTY
    (u,) = unknowns
    if not (len(u) == 1 and u[0][1] == 1 and isinstance(u[0][0], Var)):
        return None
    lo, hi = None, None
    for c, k in ineqs:
        a = c.get(u, 0)
        if a == 0:
            if k > 0:
                return EMPTY
            continue
        bound = -k / a
        if a > 0:
            b = floor(bound)
            hi = b if hi is None else min(hi, b)
        else:
            b = ceil(bound)
            lo = b if lo is None else max(lo, b)
    holes = set()
    for c, k in neqs:
        a = c.get(u, 0)
        if a == 0:
            if k == 0:
                return EMPTY
            continue
        v = -k / a
        if v.denominator == 1:
            holes.add(int(v))
    if lo is not None and hi is not None:
        if lo > hi:
            return EMPTY
        if hi - lo + 1 <= len(holes) and all(x in holes for x in range(lo, hi + 1)):
            return EMPTY
    return NONEMPTY


def refute(preds: Iterable[Pred]) -> bool:
    """Cheap sound emptiness proof used while pruning the frontier."""
    preds = list(preds)
    for p in preds:
        if p.truth() is False:
            return True
    preds = [p for p in preds if p.truth() is None]
    if not preds:
        return False
    status, ineqs, neqs = _eliminate_equalities(preds)
    if status == EMPTY:
        return True
    decided = _single_var_decide(ineqs, neqs)
    if decided is not None:
        return decided == EMPTY
    return fourier_motzkin(ineqs) is True


class _LazyArray(dict):
    """Array with arbitrary integer indices whose cells are drawn on first read."""

    def __init__(self, rng: random.Random, lo: int, hi: int):
        super().__init__()
        self.rng, self.lo, self.hi = rng, lo, hi

    def __missing__(self, key):
        v = self.rng.randint(self.lo, self.hi)
        self[key] = v
        return v


def _holds_all(preds, env) -> bool:
    try:
        return all(p.evaluate(env) for p in preds)
    except (ZeroDivisionError, Unbound, ValueError, IndexError):
        return False


def find_witness(preds: Sequence[Pred], seed: int = 0, fixed: dict | None = None) -> Optional[dict]:
    """Search a satisfying assignment: exhaustive on a small box for few
    variables, otherwise seeded random sampling."""
    fixed = dict(fixed or {})
    names = sorted(conj_free_vars(preds) - set(fixed))
    arrays = sorted(conj_arrays(preds) - set(fixed))
    if not arrays and len(names) <= 3:
        box = range(-WITNESS_BOX, WITNESS_BOX + 1)
        for vals in itertools.product(box, repeat=len(names)):
            env = dict(fixed)
            env.update(zip(names, vals))
            if _holds_all(preds, env):
                return env
    rng = random.Random(seed)
    env = _guided_witness(preds, rng, fixed)
    if env is not None:
        return env
    for i in range(WITNESS_SAMPLES):
        r = (4, 16, 64, 1000)[i % 4]
        env = dict(fixed)
        for n in names:
            env[n] = rng.randint(-r, r)
        for a in arrays:
            env[a] = _LazyArray(rng, -r, r)
        if _holds_all(preds, env):
            for a in arrays:
                env[a] = dict(env[a])
            return env
    return None


def _cells_as_vars(p: Pred, cells: dict) -> Pred:
    """Replace reads at constant indices by placeholder variables ``A[k]``."""
    def fn(a):
        if isinstance(a, Read):
            k = a.index.const_value()
            if k is not None and k.denominator == 1:
                name = f"{a.array}[{int(k)}]"
                cells[name] = (a.array, int(k))
                return Poly.var(name)
        return None
    return p.subst(fn)


def _guided_witness(preds, rng: random.Random, fixed: dict, tries: int = 12) -> Optional[dict]:
    """Fix unknowns one at a time, each inside the interval the rest of the
    system still allows (projection by Fourier-Motzkin)."""
    for attempt in range(tries):
        spread = (3, 8, 64)[attempt % 3]
        env = dict(fixed)
        cells: dict = {}
        cur = [_cells_as_vars(p, cells) for p in _bind_values(preds, env)]
        ok = True
        while ok:
            cur = [_cells_as_vars(p, cells) for p in _bind_values(cur, env)]
            if any(p.truth() is False for p in cur):
                ok = False
                break
            cur = [p for p in cur if p.truth() is None]
            free = sorted(conj_free_vars(cur) - set(env))
            if not free:
                break
            v = free[0]
            try:
                b = project_interval([p for p in cur if v in p.free_vars()], v)
            except ValueError:
                b = (None, None)
            if b is None:
                ok = False
                break
            lo, hi = b
            if lo is None and hi is None:
                lo, hi = -spread, spread
            elif lo is None:
                lo = hi - spread
            elif hi is None:
                hi = lo + spread
            else:
                mid_lo = max(lo, -spread) if max(lo, -spread) <= hi else lo
                hi = min(hi, max(spread, mid_lo))
                lo = mid_lo
            env[v] = rng.randint(lo, hi)
        if not ok:
            continue
        out = {k: x for k, x in env.items() if k not in cells}
        arrays = {}
        for name, (arr, k) in cells.items():
            if name in env:
                arrays.setdefault(arr, {})[k] = env[name]
        for arr in conj_arrays(preds) - set(fixed):
            lazy = _LazyArray(rng, -spread, spread)
            lazy.update(arrays.get(arr, {}))
            out[arr] = lazy
        for n in conj_free_vars(preds) - set(out):
            out[n] = 0
        if _holds_all(preds, out):
            for arr in conj_arrays(preds) - set(fixed):
                out[arr] = dict(out[arr])
            return out
    return None


def _bind_values(preds, env) -> list:
    if not env:
        return list(preds)
    def fn(a):
        if isinstance(a, Var) and a.name in env:
            return Poly.const(env[a.name])
        return None
    return [p.subst(fn) for p in preds]


def check(preds: Iterable[Pred], seed: int = 0) -> str:
    """Three-valued satisfiability of a conjunction (free variables existential)."""
    preds = list(preds)
    if any(p.truth() is False for p in preds):
        return EMPTY
    preds = [p for p in preds if p.truth() is None]
    if not preds:
        return NONEMPTY
    if refute(preds):
        return EMPTY
    if find_witness(preds, seed) is not None:
        return NONEMPTY
    return UNKNOWN


def check_dnf(disjuncts: Iterable[Sequence[Pred]]) -> str:
    """Satisfiability of a disjunction of conjunctions."""
    status = EMPTY
    for conj in disjuncts:
        s = check(conj)
        if s == NONEMPTY:
            return NONEMPTY
        if s == UNKNOWN:
            status = UNKNOWN
    return status


# -- projection onto one variable -----------------------------------------

def project_interval(preds: Sequence[Pred], var: str) -> Optional[tuple]:
    """Bounds ``(lo, hi)`` (None = unbounded) implied for ``var`` after
    eliminating every other unknown; None if the system is infeasible."""
    target = ((Var(var), 1),)
    status, ineqs, neqs = _eliminate_equalities(preds, keep=frozenset({target}))
    if status == EMPTY:
        return None
    rows = []
    for c, k in ineqs:
        c, k = _tighten(dict(c), k)
        if not c:
            if k > 0:
                return None
            continue
        rows.append((c, k))
    while True:
        others = set()
        for c, _ in rows:
            others |= {m for m in c if m != target}
        if not others:
            break
        u = min(others, key=str)
        pos = [(c, k) for c, k in rows if c.get(u, 0) > 0]
        neg = [(c, k) for c, k in rows if c.get(u, 0) < 0]
        keep = [(c, k) for c, k in rows if c.get(u, 0) == 0]
        new = []
        for cp, kp in pos:
            for cn, kn in neg:
                a, b = cp[u], -cn[u]
                c = {m: b * cp.get(m, 0) + a * cn.get(m, 0) for m in set(cp) | set(cn) if m != u}
                c = {m: v for m, v in c.items() if v != 0}
                c, k = _tighten(c, b * kp + a * kn)
                if not c:
                    if k > 0:
                        return None
                    continue
                new.append((c, k))
        rows = keep + new
        if len(rows) > FM_LIMIT:
            raise ValueError("projection budget exceeded")
    lo, hi = None, None
    for c, k in rows:
        a = c[target]
        bound = -k / a
        if a > 0:
            hi = floor(bound) if hi is None else min(hi, floor(bound))
        else:
            lo = ceil(bound) if lo is None else max(lo, ceil(bound))
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


# -- the center equation and the distance system --------------------------

def div2_split(pred: Pred) -> Optional[list[list[Pred]]]:
    """Rewrite ``x == y div 2`` (one halving term, non-negative operands) as
    the two cases ``y == 2x`` or ``y == 2x + 1``."""
    if pred.op != "==":
        return None
    lin = pred.poly.linear()
    if lin is None:
        return None
    coeffs, const = lin
    halves = [a for a in coeffs if isinstance(a, Op) and a.op == "/" and a.right == Poly.const(2)]
    if len(halves) != 1:
        return None
    h = halves[0]
    c = coeffs[h]
    if abs(c) != 1:
        return None
    # c*h + rest == 0  ->  h == -rest/c
    rest = pred.poly - Poly.atom(h) * c
    x = rest * (-1 / c)
    y = h.left
    return [[Pred.cmp("==", y, 2 * x)], [Pred.cmp("==", y, 2 * x + 1)]]


def solve_center_equation(p):
    """Solutions ``q`` of ``p == (p + q) div 2``.

    The halving term is split into its two exact cases and each case is
    solved for ``q``; with a concrete ``p`` the concrete values are returned,
    otherwise the offsets relative to ``p`` as polynomials.
    """
    P = Poly.var("p")
    Q = Poly.var("q")
    from .symbolic import make_op
    eq = Pred.cmp("==", P, make_op("/", P + Q, Poly.const(2)))
    sols = []
    for case in div2_split(eq):
        (c,) = case
        coeffs, const = c.poly.linear()
        a = coeffs[Var("q")]
        sol = -(c.poly - Q * a) * (1 / a)
        sols.append(sol)
    sols.sort(key=lambda s: s.constant)
    if isinstance(p, int):
        return [int(s.evaluate({"p": p})) for s in sols]
    return sols


def expand_div2(branch: Sequence[Pred]) -> list[list[Pred]]:
    """All sub-branches after splitting every halving equation in ``branch``."""
    out = [[]]
    for pred in branch:
        cases = div2_split(pred)
        if cases is None:
            out = [b + [pred] for b in out]
        else:
            out = [b + case for b in out for case in cases]
    return out


def solve_distance_system(branches: Sequence[Sequence[Pred]], var: str = "k") -> dict:
    """Solve each branch for ``var``.

    Every branch is split on its halving equations; each sub-branch is
    projected onto ``var``. Returns the per-sub-branch intervals (None when
    infeasible) and their union as a sorted list when finite.
    """
    for b in branches:
        for p in b:
            lin = p.poly.linear()
            if lin is None:
                raise ValueError(f"unsupported predicate form: {p}")
            for a in lin[0]:
                if not (isinstance(a, Var) or (isinstance(a, Op) and a.op == "/"
                                               and a.right == Poly.const(2))):
                    raise ValueError(f"unsupported term {a} in {p}")
    result = {"branches": [], "solution": None, "unbounded": False}
    values: set[int] = set()
    if not branches or all(not b for b in branches):
        result["unbounded"] = True
        result["solution"] = "all"
        return result
    for i, b in enumerate(branches):
        subs = []
        for sub in expand_div2(b):
            iv = project_interval(sub, var)
            subs.append({"preds": [str(p) for p in sub], "interval": iv, "feasible": iv is not None})
            if iv is not None:
                lo, hi = iv
                if lo is None or hi is None:
                    result["unbounded"] = True
                else:
                    values.update(range(lo, hi + 1))
        result["branches"].append(subs)
    if not result["unbounded"]:
        result["solution"] = sorted(values)
    return result


def halving_distance_system(with_upper: bool = True) -> list[list[Pred]]:
    """The two-column system at the first satisfied loop test of the halving search.

    Left column: u was changed last (``u_out == (u + l_out) div 2``),
    right column: l was changed last (``l_out == (u_out + l) div 2``). In
    both, the loop was entered (``u - l > 1`` on the pre-state) and exits
    with ``u_out - l_out <= 1``; ``k = u_out - l_out``.
    """
    from .symbolic import make_op
    u, l, uo, lo, k = (Poly.var(n) for n in ("u", "l", "u_out", "l_out", "k"))
    two = Poly.const(2)
    left = [
        Pred.cmp(">", u - lo, 1),
        Pred.cmp("==", uo, make_op("/", u + lo, two)),
        Pred.cmp("==", uo - lo, k),
    ]
    right = [
        Pred.cmp(">", uo - l, 1),
        Pred.cmp("==", lo, make_op("/", uo + l, two)),
        Pred.cmp("==", uo - lo, k),
    ]
    if with_upper:
        left.append(Pred.cmp("<=", k, 1))
        right.append(Pred.cmp("<=", k, 1))
    return [left, right]


__all__ = [
    "EMPTY", "NONEMPTY", "UNKNOWN", "check", "check_dnf", "refute",
    "find_witness", "fourier_motzkin", "project_interval", "div2_split",
    "expand_div2", "solve_center_equation", "solve_distance_system",
    "halving_distance_system",
]
