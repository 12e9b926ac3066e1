"""Symbolic integer sets as the backward engine reports them.

``Z_a`` is the anchored set of all integers: it stands for whatever value
``a`` has, so ``Z_{e,+1}`` (a shift of it) is connected to ``e``. Linear
relations such as ``Z_{5-a}`` describe a value through other variables.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .symbolic import Poly, Pred, Unbound, Var, format_poly
from . import solve


@dataclass(frozen=True)
class AllIntegers:
    anchor: Optional[str] = None


@dataclass(frozen=True)
class Shift:
    base: "SetExpr"
    c: int


@dataclass(frozen=True)
class Finite:
    values: tuple[int, ...]


@dataclass(frozen=True)
class Interval:
    lo: Optional[int] = None
    hi: Optional[int] = None


@dataclass(frozen=True)
class LinearRelation:
    """``target = sum(coef * var) + const``; the set of values allowed for ``target``."""

    target: str
    coeffs: tuple[tuple[str, Fraction], ...]
    const: Fraction = Fraction(0)

    @staticmethod
    def of(target: str, poly: Poly) -> "LinearRelation":
        lin = poly.linear()
        if lin is None or any(not isinstance(a, Var) for a in lin[0]):
            raise ValueError(f"not a linear form over variables: {poly}")
        coeffs = tuple(sorted((a.name, Fraction(c)) for a, c in lin[0].items()))
        return LinearRelation(target, coeffs, Fraction(lin[1]))

    def poly(self) -> Poly:
        p = Poly.const(self.const)
        for n, c in self.coeffs:
            p = p + Poly.var(n) * c
        return p


@dataclass(frozen=True)
class Complement:
    inner: "SetExpr"


@dataclass(frozen=True)
class Intersection:
    parts: tuple["SetExpr", ...]


@dataclass(frozen=True)
class Union:
    parts: tuple["SetExpr", ...]


SetExpr = AllIntegers | Shift | Finite | Interval | LinearRelation | Complement | Intersection | Union


def _wrap(v: int, width: Optional[int]) -> int:
    if width is None:
        return v
    m = 1 << width
    v &= m - 1
    return v - m if v >= m >> 1 else v


# -- normalization ---------------------------------------------------------

def normalize(s: SetExpr, width: Optional[int] = None) -> SetExpr:
    """Canonical form: merged shifts, no double complement, flat sorted n-ary nodes."""
    if isinstance(s, Shift):
        base = normalize(s.base, width)
        c = s.c
        if isinstance(base, Shift):
            c += base.c
            base = base.base
        c = _wrap(c, width)
        if c == 0:
            return base
        if isinstance(base, AllIntegers) and base.anchor is None:
            return base
        if isinstance(base, Finite):
            return Finite(tuple(sorted({_wrap(v + c, width) for v in base.values})))
        if isinstance(base, Interval) and width is None:
            return Interval(None if base.lo is None else base.lo + c,
                            None if base.hi is None else base.hi + c)
        if isinstance(base, LinearRelation):
            return LinearRelation(base.target, base.coeffs, base.const + c)
        return Shift(base, c)
    if isinstance(s, Complement):
        inner = normalize(s.inner, width)
        if isinstance(inner, Complement):
            return inner.inner
        return Complement(inner)
    if isinstance(s, (Intersection, Union)):
        kind = type(s)
        flat = []
        for p in s.parts:
            p = normalize(p, width)
            flat.extend(p.parts if isinstance(p, kind) else [p])
        uniq = sorted(set(flat), key=to_text)
        if kind is Intersection:
            uniq = [p for p in uniq if p != AllIntegers()] or [AllIntegers()]
        if len(uniq) == 1:
            return uniq[0]
        return kind(tuple(uniq))
    if isinstance(s, Finite):
        return Finite(tuple(sorted({_wrap(v, width) for v in s.values})))
    if isinstance(s, LinearRelation):
        coeffs = tuple(sorted((n, c) for n, c in s.coeffs if c != 0))
        return LinearRelation(s.target, coeffs, Fraction(s.const))
    return s


# -- membership ------------------------------------------------------------

def member(s: SetExpr, v: int, env: Mapping[str, int] | None = None,
           width: Optional[int] = None) -> bool:
    """Exact membership; relation variables and anchors are looked up in ``env``."""
    env = env or {}
    eq = (lambda a, b: a == b) if width is None else (lambda a, b: _wrap(a - b, width) == 0)
    if isinstance(s, AllIntegers):
        if s.anchor is None:
            return True
        if s.anchor not in env:
            raise Unbound(s.anchor)
        return eq(v, env[s.anchor])
    if isinstance(s, Shift):
        return member(s.base, v - s.c, env, width)
    if isinstance(s, Finite):
        return any(eq(v, x) for x in s.values)
    if isinstance(s, Interval):
        w = _wrap(v, width)
        return (s.lo is None or w >= s.lo) and (s.hi is None or w <= s.hi)
    if isinstance(s, LinearRelation):
        val = s.poly().evaluate(env)
        return val.denominator == 1 and eq(v, int(val))
    if isinstance(s, Complement):
        return not member(s.inner, v, env, width)
    if isinstance(s, Intersection):
        return all(member(p, v, env, width) for p in s.parts)
    if isinstance(s, Union):
        return any(member(p, v, env, width) for p in s.parts)
    raise TypeError(type(s).__name__)


def free_vars(s: SetExpr) -> set[str]:
    if isinstance(s, AllIntegers):
        return {s.anchor} if s.anchor else set()
    if isinstance(s, Shift):
        return free_vars(s.base)
    if isinstance(s, LinearRelation):
        return {n for n, _ in s.coeffs}
    if isinstance(s, Complement):
        return free_vars(s.inner)
    if isinstance(s, (Intersection, Union)):
        out = set()
        for p in s.parts:
            out |= free_vars(p)
        return out
    return set()


def enumerate_set(s: SetExpr, box: tuple[int, int], env: Mapping[str, int] | None = None,
                  width: Optional[int] = None) -> list[int]:
    """Members of ``s`` inside the closed box ``[lo, hi]``, sorted."""
    lo, hi = box
    return [v for v in range(lo, hi + 1) if member(s, v, env, width)]


# -- constraint view -------------------------------------------------------

VALUE = "_v"


def to_dnf(s: SetExpr, value: Poly | None = None) -> list[list[Pred]]:
    """``v in s`` as a disjunction of conjunctions over ``v`` and the relation variables."""
    v = value if value is not None else Poly.var(VALUE)
    if isinstance(s, AllIntegers):
        return [[Pred.cmp("==", v, Poly.var(s.anchor))]] if s.anchor else [[]]
    if isinstance(s, Shift):
        return to_dnf(s.base, v - s.c)
    if isinstance(s, Finite):
        return [[Pred.cmp("==", v, x)] for x in s.values]
    if isinstance(s, Interval):
        conj = []
        if s.lo is not None:
            conj.append(Pred.cmp(">=", v, s.lo))
        if s.hi is not None:
            conj.append(Pred.cmp("<=", v, s.hi))
        return [conj]
    if isinstance(s, LinearRelation):
        return [[Pred.cmp("==", v, s.poly())]]
    if isinstance(s, Intersection):
        out = [[]]
        for p in s.parts:
            out = [a + b for a in out for b in to_dnf(p, v)]
        return out
    if isinstance(s, Union):
        return [c for p in s.parts for c in to_dnf(p, v)]
    if isinstance(s, Complement):
        # not(or of ands) = and of (or of negated literals)
        out = [[]]
        for conj in to_dnf(s.inner, v):
            if not conj:
                return []
            out = [a + [lit.negate()] for a in out for lit in conj]
        return out
    raise TypeError(type(s).__name__)


def is_empty(s: SetExpr) -> str:
    """``empty`` only when no binding of the relation variables admits a member."""
    return solve.check_dnf(to_dnf(normalize(s)))


# -- overflow (wrap mode) --------------------------------------------------

def overflow_variants(rel: LinearRelation, width: int, spread: int = 1) -> list[LinearRelation]:
    """Relations ``target = form + k*M`` for ``|k| <= spread`` with ``M = 2**width``:
    the representable solutions of the wrapped equation split along these."""
    m = 1 << width
    return [LinearRelation(rel.target, rel.coeffs, rel.const + k * m) for k in range(-spread, spread + 1)]


def in_range(v: int, width: int) -> bool:
    return -(1 << (width - 1)) <= v < (1 << (width - 1))


# -- text and JSON ---------------------------------------------------------

def _fmt_int(c) -> str:
    return f"{c:+d}"


def to_text(s: SetExpr) -> str:
    if isinstance(s, AllIntegers):
        return f"Z_{s.anchor}" if s.anchor else "Z"
    if isinstance(s, Shift):
        if isinstance(s.base, AllIntegers) and s.base.anchor:
            return f"Z_{{{s.base.anchor},{_fmt_int(s.c)}}}"
        return f"shift({to_text(s.base)}, {_fmt_int(s.c)})"
    if isinstance(s, Finite):
        return "{" + ", ".join(str(v) for v in s.values) + "}"
    if isinstance(s, Interval):
        lo = "(-inf" if s.lo is None else f"[{s.lo}"
        hi = "+inf)" if s.hi is None else f"{s.hi}]"
        return f"{lo}, {hi}"
    if isinstance(s, LinearRelation):
        return f"Z_{{{format_poly(s.poly(), const_first=True).replace(' ', '')}}}"
    if isinstance(s, Complement):
        return f"not({to_text(s.inner)})"
    if isinstance(s, Intersection):
        return "and(" + ", ".join(to_text(p) for p in s.parts) + ")"
    if isinstance(s, Union):
        return "or(" + ", ".join(to_text(p) for p in s.parts) + ")"
    raise TypeError(type(s).__name__)


def _frac(c: Fraction):
    return int(c) if c.denominator == 1 else str(c)


def to_json(s: SetExpr) -> dict:
    if isinstance(s, AllIntegers):
        return {"kind": "all", "anchor": s.anchor}
    if isinstance(s, Shift):
        return {"kind": "shift", "base": to_json(s.base), "c": s.c}
    if isinstance(s, Finite):
        return {"kind": "finite", "values": list(s.values)}
    if isinstance(s, Interval):
        return {"kind": "interval", "lo": s.lo, "hi": s.hi}
    if isinstance(s, LinearRelation):
        return {"kind": "relation", "target": s.target,
                "coeffs": {n: _frac(c) for n, c in s.coeffs}, "const": _frac(s.const)}
    if isinstance(s, Complement):
        return {"kind": "not", "inner": to_json(s.inner)}
    if isinstance(s, Intersection):
        return {"kind": "and", "parts": [to_json(p) for p in s.parts]}
    if isinstance(s, Union):
        return {"kind": "or", "parts": [to_json(p) for p in s.parts]}
    raise TypeError(type(s).__name__)


def from_json(d: dict) -> SetExpr:
    k = d["kind"]
    if k == "all":
        return AllIntegers(d.get("anchor"))
    if k == "shift":
        return Shift(from_json(d["base"]), d["c"])
    if k == "finite":
        return Finite(tuple(d["values"]))
    if k == "interval":
        return Interval(d["lo"], d["hi"])
    if k == "relation":
        coeffs = tuple(sorted((n, Fraction(c)) for n, c in d["coeffs"].items()))
        return LinearRelation(d["target"], coeffs, Fraction(d["const"]))
    if k == "not":
        return Complement(from_json(d["inner"]))
    if k == "and":
        return Intersection(tuple(from_json(p) for p in d["parts"]))
    if k == "or":
        return Union(tuple(from_json(p) for p in d["parts"]))
    raise ValueError(f"unknown set kind {k!r}")


def dumps(s: SetExpr) -> str:
    return json.dumps(to_json(s), sort_keys=True)


__all__ = [
    "AllIntegers", "Shift", "Finite", "Interval", "LinearRelation", "Complement",
    "Intersection", "Union", "SetExpr", "normalize", "member", "free_vars",
    "enumerate_set", "to_dnf", "is_empty", "overflow_variants", "in_range",
    "to_text", "to_json", "from_json", "dumps",
]
