"""Symbolic integer terms and predicates.

A :class:`Poly` is a polynomial with rational coefficients over *atoms*.
Atoms are named variables plus a few opaque integer-valued nodes (array
reads, integer division, bitwise operators, if-then-else and 0/1 truth
values) so that every subject-language expression has an exact symbolic
form. Solvers treat opaque atoms as unknown integers, which is always a
sound relaxation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Mapping, Optional


class Unbound(KeyError):
    """A variable or array needed for evaluation has no binding."""


# -- atoms -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Read:
    array: str
    index: "Poly"

    def __str__(self):
        return f"{self.array}[{self.index}]"


@dataclass(frozen=True)
class Op:
    """Non-polynomial binary operator with C semantics: / % ^ & |."""

    op: str
    left: "Poly"
    right: "Poly"

    def __str__(self):
        name = {"/": "div", "%": "mod", "^": "xor", "&": "and", "|": "or"}[self.op]
        return f"{name}({self.left}, {self.right})"


@dataclass(frozen=True)
class Ite:
    cond: "Pred"
    then: "Poly"
    other: "Poly"

    def __str__(self):
        return f"ite({self.cond}, {self.then}, {self.other})"


@dataclass(frozen=True)
class Truth:
    """1 if the predicate holds, else 0 (a comparison used as a value)."""

    pred: "Pred"

    def __str__(self):
        return f"[{self.pred}]"


Atom = Var | Read | Op | Ite | Truth


def _akey(a) -> str:
    return str(a)


def c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _apply_op(op: str, a: int, b: int) -> int:
    if op == "/":
        return c_div(a, b)
    if op == "%":
        return a - b * c_div(a, b)
    if op == "^":
        return a ^ b
    if op == "&":
        return a & b
    if op == "|":
        return a | b
    raise ValueError(op)


# -- polynomials -----------------------------------------------------------

Mono = tuple  # sorted tuple of (atom, power)


def _mono_key(m: Mono) -> tuple:
    return (sum(p for _, p in m), tuple((_akey(a), p) for a, p in m))


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    powers: dict = {}
    for a, p in m1 + m2:
        powers[a] = powers.get(a, 0) + p
    return tuple(sorted(powers.items(), key=lambda ap: _akey(ap[0])))


class Poly:
    """Immutable polynomial ``sum(coef * monomial)``; the empty monomial is the constant."""

    def __init__(self, terms: Mapping[Mono, Fraction] | None = None):
        t = {m: (c if type(c) is Fraction else Fraction(c))
             for m, c in (terms or {}).items() if c != 0}
        self.terms = t
        self._hash = None
        self._names = None

    # constructors
    @staticmethod
    def const(c) -> "Poly":
        return Poly({(): Fraction(c)})

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly({((Var(name), 1),): Fraction(1)})

    @staticmethod
    def atom(a) -> "Poly":
        return Poly({((a, 1),): Fraction(1)})

    # arithmetic
    def __add__(self, other) -> "Poly":
        other = _lift(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Poly(t)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other) -> "Poly":
        other = _lift(other)
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                t[m] = t.get(m, 0) + c1 * c2
        return Poly(t)

    __rmul__ = __mul__

    # inspection
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    @property
    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def const_value(self) -> Optional[Fraction]:
        return self.constant if self.is_const() else None

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda mc: _mono_key(mc[0]))

    def atoms(self) -> set:
        return {a for m in self.terms for a, _ in m}

    def free_vars(self) -> set[str]:
        out: set[str] = set()
        for a in self.atoms():
            out |= atom_vars(a)
        return out

    def arrays(self) -> set[str]:
        out: set[str] = set()
        for a in self.atoms():
            out |= atom_arrays(a)
        return out

    def names(self) -> frozenset:
        """Variables and arrays this polynomial depends on (cached)."""
        if self._names is None:
            self._names = frozenset(self.free_vars() | self.arrays())
        return self._names

    def linear(self) -> Optional[tuple[dict, Fraction]]:
        """``({atom: coef}, const)`` when every monomial has degree <= 1."""
        coeffs = {}
        for m, c in self.terms.items():
            if m == ():
                continue
            if len(m) != 1 or m[0][1] != 1:
                return None
            coeffs[m[0][0]] = c
        return coeffs, self.constant

    def coeff_of(self, name: str) -> Optional[Fraction]:
        """Coefficient of the plain variable ``name`` if it occurs only linearly at top level."""
        return self.terms.get(((Var(name), 1),))

    def degree_in(self, name: str) -> int:
        v = Var(name)
        return max((p for m in self.terms for a, p in m if a == v), default=0)

    def integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    # transformation
    def subst(self, fn: Callable[[object], Optional["Poly"]]) -> "Poly":
        """Rebuild bottom-up; ``fn(atom)`` may return a replacement polynomial."""
        out = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            for a, p in m:
                rep = subst_atom(a, fn)
                for _ in range(p):
                    term = term * rep
            out = out + term
        return out

    def rename(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        if not mapping:
            return self
        return self.subst(lambda a: mapping.get(a.name) if isinstance(a, Var) else None)

    def evaluate(self, env: Mapping) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for a, p in m:
                v *= Fraction(eval_atom(a, env)) ** p
            total += v
        return total

    def eval_int(self, env: Mapping) -> int:
        v = self.evaluate(env)
        if v.denominator != 1:
            raise ValueError(f"{self} is not integral at {dict(env)}")
        return int(v)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def _lift(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot lift {type(x).__name__} to Poly")


def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly, const_first: bool = False) -> str:
    if not p.terms:
        return "0"
    parts = []
    items = p.sorted_terms()
    # constant last reads naturally for "a + b - 5", first for "5 - a"
    var_items = [mc for mc in items if mc[0] != ()]
    const_items = [mc for mc in items if mc[0] == ()]
    items = const_items + var_items if const_first else var_items + const_items
    for i, (m, c) in enumerate(items):
        if m == ():
            body = _fmt_coef(abs(c))
        else:
            factors = "*".join(str(a) if p_ == 1 else f"{a}^{p_}" for a, p_ in m)
            body = factors if abs(c) == 1 else f"{_fmt_coef(abs(c))}*{factors}"
        if i == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def atom_vars(a) -> set[str]:
    if isinstance(a, Var):
        return {a.name}
    if isinstance(a, Read):
        return a.index.free_vars()
    if isinstance(a, Op):
        return a.left.free_vars() | a.right.free_vars()
    if isinstance(a, Ite):
        return a.cond.free_vars() | a.then.free_vars() | a.other.free_vars()
    if isinstance(a, Truth):
        return a.pred.free_vars()
    raise TypeError(a)


def atom_arrays(a) -> set[str]:
    if isinstance(a, Var):
        return set()
    if isinstance(a, Read):
        return {a.array} | a.index.arrays()
    if isinstance(a, Op):
        return a.left.arrays() | a.right.arrays()
    if isinstance(a, Ite):
        return a.cond.poly.arrays() | a.then.arrays() | a.other.arrays()
    if isinstance(a, Truth):
        return a.pred.poly.arrays()
    raise TypeError(a)


def eval_atom(a, env: Mapping) -> int:
    if isinstance(a, Var):
        try:
            return env[a.name]
        except KeyError:
            raise Unbound(a.name) from None
    if isinstance(a, Read):
        try:
            arr = env[a.array]
        except KeyError:
            raise Unbound(a.array) from None
        idx = a.index.eval_int(env)
        if isinstance(arr, (list, tuple)) and not 0 <= idx < len(arr):
            raise IndexError(f"{a.array}[{idx}] out of bounds")
        return arr[idx]
    if isinstance(a, Op):
        l, r = a.left.eval_int(env), a.right.eval_int(env)
        if a.op in "/%" and r == 0:
            raise ZeroDivisionError(str(a))
        return _apply_op(a.op, l, r)
    if isinstance(a, Ite):
        return a.then.eval_int(env) if a.cond.evaluate(env) else a.other.eval_int(env)
    if isinstance(a, Truth):
        return int(a.pred.evaluate(env))
    raise TypeError(a)


def subst_atom(a, fn) -> Poly:
    rep = fn(a)
    if rep is not None:
        return rep
    if isinstance(a, Var):
        return Poly.atom(a)
    if isinstance(a, Read):
        return read(a.array, a.index.subst(fn), fn)
    if isinstance(a, Op):
        return make_op(a.op, a.left.subst(fn), a.right.subst(fn))
    if isinstance(a, Ite):
        return make_ite(a.cond.subst(fn), a.then.subst(fn), a.other.subst(fn))
    if isinstance(a, Truth):
        return truth(a.pred.subst(fn))
    raise TypeError(a)


def read(array: str, index: Poly, fn=None) -> Poly:
    """``array[index]``; ``fn`` may map the rebuilt Read atom (used for array stores)."""
    a = Read(array, index)
    if fn is not None:
        rep = fn(a)
        if rep is not None:
            return rep
    return Poly.atom(a)


def make_op(op: str, left: Poly, right: Poly) -> Poly:
    lv, rv = left.const_value(), right.const_value()
    if lv is not None and rv is not None and lv.denominator == 1 and rv.denominator == 1:
        if not (op in "/%" and rv == 0):
            return Poly.const(_apply_op(op, int(lv), int(rv)))
    if rv is not None:
        if op == "/" and rv == 1:
            return left
        if op == "%" and abs(rv) == 1:
            return Poly.const(0)
        if op in "^|" and rv == 0:
            return left
        if op == "&" and rv == 0:
            return Poly.const(0)
    if lv is not None and lv == 0 and op in "^|":
        return right
    if op == "^" and left == right:
        return Poly.const(0)
    return Poly.atom(Op(op, left, right))


def make_ite(cond: "Pred", then: Poly, other: Poly) -> Poly:
    t = cond.truth()
    if t is True:
        return then
    if t is False:
        return other
    if then == other:
        return then
    return Poly.atom(Ite(cond, then, other))


def truth(p: "Pred") -> Poly:
    t = p.truth()
    if t is not None:
        return Poly.const(int(t))
    return Poly.atom(Truth(p))


# -- predicates ------------------------------------------------------------

_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


class Pred:
    """``poly OP 0`` with OP in ``==``, ``!=``, ``<=`` (strict forms are tightened).

    Construction normalizes: integer coefficients with gcd 1, tightened
    constant for inequalities, a sign convention for (dis)equalities, and
    folding of predicates over a single 0/1 truth atom.
    """

    __slots__ = ("op", "poly", "_hash", "_fn")

    def __init__(self, op: str, poly: Poly, _normal: bool = False):
        if not _normal:
            op, poly = _normalize(op, poly)
        self.op = op
        self.poly = poly
        self._hash = None
        self._fn = None

    @staticmethod
    def cmp(op: str, lhs, rhs) -> "Pred":
        lhs, rhs = _lift(lhs), _lift(rhs)
        if op == "==":
            return Pred("==", lhs - rhs)
        if op == "!=":
            return Pred("!=", lhs - rhs)
        if op == "<=":
            return Pred("<=", lhs - rhs)
        if op == "<":
            return Pred("<=", lhs - rhs + 1)
        if op == ">=":
            return Pred("<=", rhs - lhs)
        if op == ">":
            return Pred("<=", rhs - lhs + 1)
        raise ValueError(op)

    @staticmethod
    def true() -> "Pred":
        return Pred("==", Poly(), _normal=True)

    @staticmethod
    def false() -> "Pred":
        return Pred("!=", Poly(), _normal=True)

    def truth(self) -> Optional[bool]:
        v = self.poly.const_value()
        if v is None:
            return None
        return _holds(self.op, v)

    def negate(self) -> "Pred":
        if self.op == "==":
            return Pred("!=", self.poly, _normal=True)
        if self.op == "!=":
            return Pred("==", self.poly, _normal=True)
        return Pred("<=", -self.poly + 1)

    def subst(self, fn) -> "Pred":
        return Pred(self.op, self.poly.subst(fn))

    def rename(self, mapping) -> "Pred":
        return Pred(self.op, self.poly.rename(mapping)) if mapping else self

    def evaluate(self, env: Mapping) -> bool:
        return _holds(self.op, self.poly.evaluate(env))

    def free_vars(self) -> set[str]:
        return self.poly.free_vars()

    def compiled(self) -> Callable[[Mapping], bool]:
        """Fast evaluator (integer arithmetic where possible), built once."""
        if self._fn is None:
            f = compile_poly(self.poly)
            op = self.op
            if op == "==":
                self._fn = lambda env: f(env) == 0
            elif op == "!=":
                self._fn = lambda env: f(env) != 0
            else:
                self._fn = lambda env: f(env) <= 0
        return self._fn

    def __eq__(self, other):
        return isinstance(other, Pred) and self.op == other.op and self.poly == other.poly

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.op, self.poly))
        return self._hash

    def sort_key(self) -> tuple:
        return (str(self),)

    def __str__(self):
        t = self.truth()
        if t is not None:
            return "true" if t else "false"
        lhs = self.poly - self.poly.constant
        rhs = -self.poly.constant
        # prefer a leading positive term
        first = lhs.sorted_terms()[0][1]
        op = self.op
        if first < 0 and op in ("==", "!="):
            lhs, rhs = -lhs, -rhs
        elif first < 0 and op == "<=":
            lhs, rhs, op = -lhs, -rhs, ">="
        return f"{format_poly(lhs)} {op} {_fmt_coef(rhs)}"

    def __repr__(self):
        return f"Pred({self})"


def _holds(op: str, v: Fraction) -> bool:
    if op == "==":
        return v == 0
    if op == "!=":
        return v != 0
    if op == "<=":
        return v <= 0
    raise ValueError(op)


def _normalize(op: str, poly: Poly) -> tuple[str, Poly]:
    if op not in ("==", "!=", "<="):
        raise ValueError(op)
    if poly.is_const():
        return op, poly
    folded = _fold_truth(op, poly)
    if folded is not None:
        return folded.op, folded.poly
    den = lcm(*(c.denominator for c in poly.terms.values()))
    scaled = {m: c * den for m, c in poly.terms.items()}
    g = 0
    for m, c in scaled.items():
        if m != ():
            g = gcd(g, int(c))
    const = scaled.get((), Fraction(0))
    body = {m: c / g for m, c in scaled.items() if m != ()}
    if op == "<=":
        # g*q + const <= 0  <=>  q + ceil(const/g) <= 0 over the integers
        body[()] = Fraction(-((-const) // g))
        return op, Poly(body)
    if const % g != 0:
        # g*q == const has no integer solution
        return op, Poly.const(1)
    body[()] = const / g
    p = Poly(body)
    lead = p.sorted_terms()
    lead = [mc for mc in lead if mc[0] != ()][0][1]
    if lead < 0:
        p = -p
    return op, p


def _fold_truth(op: str, poly: Poly) -> Optional[Pred]:
    """Resolve ``c*[P] + d OP 0`` into P, not-P, true or false."""
    lin = poly.linear()
    if lin is None:
        return None
    coeffs, d = lin
    if len(coeffs) != 1:
        return None
    (a, c), = coeffs.items()
    if not isinstance(a, Truth):
        return None
    when1, when0 = _holds(op, c + d), _holds(op, d)
    if when1 and when0:
        return Pred.true()
    if not when1 and not when0:
        return Pred.false()
    return a.pred if when1 else a.pred.negate()


def _compile_atom(a) -> Callable[[Mapping], int]:
    if isinstance(a, Var):
        name = a.name

        def var(env):
            try:
                return env[name]
            except KeyError:
                raise Unbound(name) from None
        return var
    if isinstance(a, Read):
        idx = compile_poly(a.index)
        arr_name = a.array

        def rd(env):
            try:
                arr = env[arr_name]
            except KeyError:
                raise Unbound(arr_name) from None
            i = idx(env)
            if isinstance(arr, (list, tuple)) and not 0 <= i < len(arr):
                raise IndexError(f"{arr_name}[{i}] out of bounds")
            return arr[i]
        return rd
    return lambda env: eval_atom(a, env)


def compile_poly(p: Poly) -> Callable[[Mapping], object]:
    """Closure evaluating ``p``; exact (Fraction) only when coefficients need it."""
    integral = p.integral()
    terms = []
    for m, c in p.terms.items():
        coef = int(c) if integral else c
        terms.append((coef, [(_compile_atom(a), k) for a, k in m]))

    def run(env):
        total = 0
        for coef, factors in terms:
            v = coef
            for fn, k in factors:
                x = fn(env)
                v *= x if k == 1 else x ** k
            total += v
        return total
    return run


def conj_free_vars(preds: Iterable[Pred]) -> set[str]:
    out: set[str] = set()
    for p in preds:
        out |= p.free_vars()
    return out


def conj_arrays(preds: Iterable[Pred]) -> set[str]:
    out: set[str] = set()
    for p in preds:
        out |= p.poly.arrays()
    return out


__all__ = [
    "Var", "Read", "Op", "Ite", "Truth", "Poly", "Pred", "Unbound", "c_div",
    "make_op", "make_ite", "truth", "read", "format_poly", "atom_vars",
    "atom_arrays", "eval_atom", "subst_atom", "conj_free_vars", "conj_arrays",
    "compile_poly",
]
