"""Backward symbolic execution.

The frontier is a list of pairs. Each pair holds a path condition and the
tracked outputs, both written over the program variables as they are at
the current backward position. Walking a statement backward substitutes
its effect into every pair, so once the walk reaches the function entry
each surviving pair speaks only about the inputs: it is one history.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

from ..constraint import sets as S
from ..constraint import solve
from ..constraint.symbolic import (
    Ite, Op, Poly, Pred, Read, Truth, Unbound, Var, format_poly, make_ite, make_op,
    read, truth,
)
from ..minilang.ast import (
    Assign, BinOp, Block, BoolOp, CallExpr, CallStmt, Compare, Decl, DoWhile,
    Expr, FunctionDecl, If, Index, Name, Neg, Not, Num, Program, Rand, Return,
    Stmt, While, walk, walk_expr,
)
from ..minilang.desugar import desugar
from ..minilang.parser import Parser
from ..minilang.printer import format_expr, format_stmt

DEFAULT_BUDGET = 100_000
DEFAULT_UNROLL = 16
RET = "ret@"
EXIST_BOX = 8
EXIST_SPAN = 64


class AnalysisError(Exception):
    pass


class UnknownCallee(AnalysisError):
    pass


class RecursiveCall(AnalysisError):
    pass


class _Budget(Exception):
    pass


@dataclass(frozen=True)
class LoopPolicy:
    """``unroll`` is K for Unroll(K); ``affine`` tries the closed-form summary first."""

    unroll: int = DEFAULT_UNROLL
    affine: bool = True

    def __str__(self):
        return f"affine+unroll({self.unroll})" if self.affine else f"unroll({self.unroll})"


def Unroll(k: int) -> LoopPolicy:
    return LoopPolicy(k, affine=False)


def AffineSummary(fallback: int = DEFAULT_UNROLL) -> LoopPolicy:
    return LoopPolicy(fallback, affine=True)


# -- frontier pieces -------------------------------------------------------

@dataclass(frozen=True)
class Cond:
    pred: Pred
    line: int
    kind: str  # out, if, loop, exit, summary, assume, store
    truth: bool = True


@dataclass(frozen=True)
class Decision:
    sid: int
    line: int
    label: str
    code: int


@dataclass(frozen=True)
class HFrame:
    line: int
    text: str
    outputs: tuple
    note: str = ""

    def shown(self) -> dict:
        return {name: describe_output(name, p) for name, p in self.outputs}


@dataclass(frozen=True)
class Pair:
    conds: tuple = ()
    outputs: tuple = ()  # ((name, Poly), ...)
    decisions: tuple = ()  # forward order
    frames: object = None  # cons list (HFrame, rest)
    fresh: frozenset = frozenset()
    sentinel: bool = False

    def preds(self) -> list[Pred]:
        return [c.pred for c in self.conds]

    def subst(self, fn, names: frozenset | None = None) -> Optional["Pair"]:
        """Apply ``fn`` to every atom; ``names`` (if given) lists the only
        variables/arrays ``fn`` can touch, so other terms are skipped."""
        conds = []
        for c in self.conds:
            if names is not None and not (c.pred.poly.names() & names):
                conds.append(c)
                continue
            p = c.pred.subst(fn)
            t = p.truth()
            if t is False:
                return None
            if t is None:
                conds.append(c if p == c.pred else replace(c, pred=p))
        outs = tuple((n, q if names is not None and not (q.names() & names) else q.subst(fn))
                     for n, q in self.outputs)
        return replace(self, conds=tuple(conds), outputs=outs)

    def add(self, preds: Iterable[Pred], line: int, kind: str, branch: bool) -> Optional["Pair"]:
        conds = list(self.conds)
        for p in preds:
            t = p.truth()
            if t is False:
                return None
            if t is None and all(c.pred != p for c in conds):
                conds.append(Cond(p, line, kind, branch))
        return replace(self, conds=tuple(conds))

    def decide(self, d: Decision) -> "Pair":
        return replace(self, decisions=(d,) + self.decisions)

    def note(self, line: int, text: str, note: str = "") -> "Pair":
        if self.sentinel:
            return self
        return replace(self, frames=(HFrame(line, text, self.outputs, note), self.frames))

    def key(self):
        return (frozenset(self.preds()), self.outputs, self.sentinel)


@dataclass
class Frontier:
    pairs: list
    truncated: bool = False

    @staticmethod
    def seed(outputs: Mapping[str, object] | None = None, spec: str | None = None) -> "Frontier":
        """A one-pair frontier tracking ``outputs`` (name -> variable name or Poly)."""
        outs = []
        for n, v in (outputs or {}).items():
            outs.append((n, Poly.var(v) if isinstance(v, str) else v))
        pairs = [Pair(outputs=tuple(outs))]
        if spec and spec.strip() != "any":
            e = parse_spec(spec)
            eng = Engine(Program(()))
            ctx = _entry_ctx(eng, None)
            pairs = [q for p in pairs for conj in eng.pos(e, ctx)
                     if (q := p.add(conj, 0, "out", True)) is not None]
        return Frontier(pairs)

    def __len__(self):
        return len(self.pairs)


@dataclass
class GrowthRow:
    line: int
    kind: str
    visits: int = 0
    pairs_in: int = 0
    created: int = 0
    pruned: int = 0
    pairs_out: int = 0

    @property
    def factor(self) -> float:
        return self.pairs_out / self.pairs_in if self.pairs_in else 0.0

    @property
    def flagged(self) -> bool:
        return self.factor >= 2 and self.pairs_in >= 2


@dataclass
class Ctx:
    func: Optional[FunctionDecl]
    scope: dict
    prefix: str
    ret: Callable
    stack: tuple = ()

    def sym(self, name: str) -> str:
        return self.scope.get(name, self.prefix + name)


def _entry_ctx(eng: "Engine", f: Optional[FunctionDecl], ret=None) -> Ctx:
    return Ctx(f, {}, "", ret or (lambda poly: []), (f.name,) if f else ())


def parse_spec(text: str) -> Expr:
    p = Parser(text)
    e = p.parse_expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.describe(p.tok)}")
    return e


def _var_fn(name: str, rep: Poly):
    target = Var(name)
    return lambda a: rep if a == target else None


def _mentions(pair: Pair, names) -> bool:
    for c in pair.conds:
        if c.pred.poly.names() & names:
            return True
    for _, q in pair.outputs:
        if q.names() & names:
            return True
    return False


def _stmt_text(s: Stmt) -> str:
    if isinstance(s, If):
        return f"if ({format_expr(s.cond)})"
    if isinstance(s, While):
        return f"while ({format_expr(s.cond)})"
    if isinstance(s, DoWhile):
        return f"do .. while ({format_expr(s.cond)})"
    return format_stmt(s)[0].strip()


# -- the engine ------------------------------------------------------------

class Engine:
    def __init__(self, program: Program, policy: LoopPolicy | None = None,
                 budget: int = DEFAULT_BUDGET):
        self.program = desugar(program)
        self.policy = policy or LoopPolicy()
        self.budget = budget
        self.growth: dict[tuple, GrowthRow] = {}
        self.created = 0
        self._fresh = itertools.count(1)
        self._calls = itertools.count(1)
        self._refuted: dict = {}
        self.truncated = False
        self.reasons: list[str] = []

    # -- expressions -------------------------------------------------------
    def poly(self, e: Expr, ctx: Ctx, fresh: set) -> Poly:
        if isinstance(e, Num):
            return Poly.const(e.value)
        if isinstance(e, Name):
            return Poly.var(ctx.sym(e.id))
        if isinstance(e, Index):
            return read(ctx.sym(e.array), self.poly(e.index, ctx, fresh))
        if isinstance(e, BinOp):
            a, b = self.poly(e.left, ctx, fresh), self.poly(e.right, ctx, fresh)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            return make_op(e.op, a, b)
        if isinstance(e, Compare):
            return truth(Pred.cmp(e.op, self.poly(e.left, ctx, fresh), self.poly(e.right, ctx, fresh)))
        if isinstance(e, BoolOp):
            a = truth(Pred("!=", self.poly(e.left, ctx, fresh)))
            b = truth(Pred("!=", self.poly(e.right, ctx, fresh)))
            return a * b if e.op == "&&" else a + b - a * b
        if isinstance(e, Not):
            return truth(Pred("==", self.poly(e.operand, ctx, fresh)))
        if isinstance(e, Neg):
            return -self.poly(e.operand, ctx, fresh)
        if isinstance(e, Rand):
            name = f"rand@{ctx.prefix}{next(self._fresh)}"
            fresh.add(name)
            return Poly.var(name)
        if isinstance(e, CallExpr):
            raise AnalysisError(f"call to {e.name!r} must be a whole right-hand side")
        raise TypeError(type(e).__name__)

    def pos(self, e: Expr, ctx: Ctx, fresh: set | None = None) -> list[list[Pred]]:
        """Mutually exclusive conjunctions whose union is ``e`` true."""
        fresh = set() if fresh is None else fresh
        if isinstance(e, BoolOp) and e.op == "&&":
            return _clean([a + b for a in self.pos(e.left, ctx, fresh) for b in self.pos(e.right, ctx, fresh)])
        if isinstance(e, BoolOp):
            return _clean(self.pos(e.left, ctx, fresh)
                          + [a + b for a in self.neg(e.left, ctx, fresh) for b in self.pos(e.right, ctx, fresh)])
        if isinstance(e, Not):
            return self.neg(e.operand, ctx, fresh)
        if isinstance(e, Compare):
            return _clean([[Pred.cmp(e.op, self.poly(e.left, ctx, fresh), self.poly(e.right, ctx, fresh))]])
        return _clean([[Pred("!=", self.poly(e, ctx, fresh))]])

    def neg(self, e: Expr, ctx: Ctx, fresh: set | None = None) -> list[list[Pred]]:
        fresh = set() if fresh is None else fresh
        if isinstance(e, BoolOp) and e.op == "&&":
            return _clean(self.neg(e.left, ctx, fresh)
                          + [a + b for a in self.pos(e.left, ctx, fresh) for b in self.neg(e.right, ctx, fresh)])
        if isinstance(e, BoolOp):
            return _clean([a + b for a in self.neg(e.left, ctx, fresh) for b in self.neg(e.right, ctx, fresh)])
        if isinstance(e, Not):
            return self.pos(e.operand, ctx, fresh)
        if isinstance(e, Compare):
            p = Pred.cmp(e.op, self.poly(e.left, ctx, fresh), self.poly(e.right, ctx, fresh))
            return _clean([[p.negate()]])
        return _clean([[Pred("==", self.poly(e, ctx, fresh))]])

    # -- frontier housekeeping --------------------------------------------
    def _guard(self, pairs: list) -> list:
        self.created += len(pairs)
        if len(pairs) > self.budget:
            raise _Budget()
        return pairs

    def _refute(self, pair: Pair) -> bool:
        key = frozenset(pair.preds())
        hit = self._refuted.get(key)
        if hit is None:
            hit = solve.refute(key)
            self._refuted[key] = hit
        return hit

    def constrain(self, pairs, dnf, s: Stmt, kind: str, branch: bool, row: GrowthRow | None = None):
        out = []
        made = 0
        for p in pairs:
            for conj in dnf:
                q = p.add(conj, s.line, kind, branch)
                made += 1
                if q is None or (conj and self._refute(q)):
                    continue
                out.append(q)
        if row is not None:
            row.created += made
            row.pruned += made - len(out)
        return out

    def _row(self, s: Stmt, kind: str) -> GrowthRow:
        key = (s.line, s.sid)
        if key not in self.growth:
            self.growth[key] = GrowthRow(s.line, kind)
        return self.growth[key]

    def _apply(self, pairs, fn, names: set[str], fresh=frozenset()):
        out = []
        for p in pairs:
            if not _mentions(p, names):
                out.append(p if not fresh else replace(p, fresh=p.fresh | fresh))
                continue
            q = p.subst(fn, frozenset(names))
            if q is not None:
                out.append(replace(q, fresh=q.fresh | fresh) if fresh else q)
        return out

    # -- statements --------------------------------------------------------
    def back(self, s: Stmt, pairs: list, ctx: Ctx) -> list:
        if isinstance(s, Block):
            stmts = list(s.stmts)
            i = len(stmts)
            while i > 0:
                sw = _swap_idiom(stmts[i - 3:i]) if i >= 3 else None
                if sw is not None:
                    pairs = self.reverse_swap(sw, pairs, ctx, stmts[i - 3:i])
                    i -= 3
                    continue
                pairs = self.back(stmts[i - 1], pairs, ctx)
                i -= 1
            return pairs
        if isinstance(s, Return):
            fresh: set = set()
            v = self.poly(s.value, ctx, fresh) if s.value is not None else None
            out = ctx.ret(v)
            if fresh:
                out = [replace(p, fresh=p.fresh | frozenset(fresh)) for p in out]
            return self._guard([p.note(s.line, _stmt_text(s)) for p in out])
        if isinstance(s, (Assign, Decl)):
            value = s.value if isinstance(s, Assign) else s.init
            if isinstance(value, CallExpr):
                target = s.target if isinstance(s, Assign) else Name(s.name)
                return self.reverse_call(s, pairs, ctx, value.name, value.args, target)
            return self.reverse_assign(s, pairs, ctx)
        if isinstance(s, If):
            return self.reverse_if(s, pairs, ctx)
        if isinstance(s, (While, DoWhile)):
            return self.reverse_loop(s, pairs, ctx)
        if isinstance(s, CallStmt):
            if s.name == "swap" and not _defined(self.program, "swap"):
                return self.reverse_swap(tuple(s.args), pairs, ctx, [s])
            return self.reverse_call(s, pairs, ctx, s.name, s.args, None)
        raise AnalysisError(f"line {s.line}: unsupported statement {type(s).__name__}")

    def reverse_assign(self, s, pairs, ctx):
        fresh: set = set()
        text = _stmt_text(s)
        if isinstance(s, Decl):
            sym = ctx.sym(s.name)
            if s.is_array:
                fn = lambda a: Poly.const(0) if isinstance(a, Read) and a.array == sym else None
                out = self._apply(pairs, fn, {sym})
            else:
                rhs = self.poly(s.init, ctx, fresh) if s.init is not None else Poly.const(0)
                out = self._apply(pairs, _var_fn(sym, rhs), {sym}, frozenset(fresh))
        elif isinstance(s.target, Name):
            sym = ctx.sym(s.target.id)
            rhs = self.poly(s.value, ctx, fresh)
            out = self._apply(pairs, _var_fn(sym, rhs), {sym}, frozenset(fresh))
        else:
            arr = ctx.sym(s.target.array)
            idx = self.poly(s.target.index, ctx, fresh)
            val = self.poly(s.value, ctx, fresh)

            def fn(a):
                if isinstance(a, Read) and a.array == arr:
                    j = a.index.subst(fn)
                    return make_ite(Pred.cmp("==", j, idx), val, Poly.atom(Read(arr, j)))
                return None
            out = self._apply(pairs, fn, {arr}, frozenset(fresh))
        return self._guard([p.note(s.line, text) for p in out])

    def reverse_swap(self, cells, pairs, ctx, stmts):
        """Swap of two cells (or scalars); ``t`` of the idiom maps to the first cell."""
        fresh: set = set()
        (c1, c2), temp = (cells[0], cells[1]), (cells[2] if len(cells) > 2 else None)
        refs = [self._cell(c, ctx, fresh) for c in (c1, c2)]
        names = {r[0] for r in refs}
        if temp is not None:
            names.add(ctx.sym(temp))

        def cell_val(r):
            return Poly.var(r[0]) if r[1] is None else Poly.atom(Read(r[0], r[1]))

        v1, v2 = cell_val(refs[0]), cell_val(refs[1])

        def fn(a):
            if temp is not None and a == Var(ctx.sym(temp)):
                return v1
            if isinstance(a, Var):
                if refs[0][1] is None and a.name == refs[0][0]:
                    return v2
                if refs[1][1] is None and a.name == refs[1][0]:
                    return v1
                return None
            if isinstance(a, Read):
                j = a.index.subst(fn)
                base = Poly.atom(Read(a.array, j))
                r0, r1 = refs
                if r1[1] is not None and a.array == r1[0]:
                    base = make_ite(Pred.cmp("==", j, r1[1]), v1, base)
                if r0[1] is not None and a.array == r0[0]:
                    base = make_ite(Pred.cmp("==", j, r0[1]), v2, base)
                return base
            return None
        out = self._apply(pairs, fn, names, frozenset(fresh))
        line = stmts[0].line
        text = "; ".join(_stmt_text(x) for x in stmts)
        return self._guard([p.note(line, text, "swap") for p in out])

    def _cell(self, e: Expr, ctx, fresh):
        if isinstance(e, Name):
            return (ctx.sym(e.id), None)
        if isinstance(e, Index):
            return (ctx.sym(e.array), self.poly(e.index, ctx, fresh))
        raise AnalysisError("swap operands must be variables or array cells")

    def reverse_if(self, s: If, pairs, ctx):
        row = self._row(s, "if")
        row.visits += 1
        row.pairs_in += len(pairs)
        fresh: set = set()
        pos, neg = self.pos(s.cond, ctx, fresh), self.neg(s.cond, ctx, fresh)
        text = _stmt_text(s)
        then = self.back(s.then, pairs, ctx)
        other = self.back(s.orelse, pairs, ctx) if s.orelse is not None else pairs
        then = [p.decide(Decision(s.sid, s.line, "then", 0)).note(s.line, text, "true")
                for p in self.constrain(then, pos, s, "if", True, row)]
        other = [p.decide(Decision(s.sid, s.line, "else", 1)).note(s.line, text, "false")
                 for p in self.constrain(other, neg, s, "if", False, row)]
        out = _dedupe(then + other)
        if fresh:
            out = [replace(p, fresh=p.fresh | frozenset(fresh)) for p in out]
        row.pairs_out += len(out)
        return self._guard(out)

    # -- loops -------------------------------------------------------------
    def reverse_loop(self, s, pairs, ctx):
        row = self._row(s, "loop")
        row.visits += 1
        row.pairs_in += len(pairs)
        out = None
        if self.policy.affine:
            summary = affine_summary(self, s, ctx)
            if summary is not None:
                out = summary.apply(self, pairs, row)
        if out is None:
            out = self._unroll(s, pairs, ctx, row)
        out = _dedupe(out)
        row.pairs_out += len(out)
        return self._guard(out)

    def _unroll(self, s, pairs, ctx, row):
        K = self.policy.unroll
        noret = replace(ctx, ret=lambda poly: [])
        has_ret = any(isinstance(x, Return) for x in walk(s.body))
        fresh: set = set()
        pos, neg = self.pos(s.cond, ctx, fresh), self.neg(s.cond, ctx, fresh)
        text = _stmt_text(s)
        is_do = isinstance(s, DoWhile)

        def tag(ps, label, code):
            return [p.decide(Decision(s.sid, s.line, label, code)).note(s.line, text, label) for p in ps]

        def body(ps, c=noret):
            return self.back(s.body, ps, c)

        def enter(ps):
            return self.constrain(ps, pos, s, "loop", True, row)

        families = []
        exited = self.constrain(pairs, neg, s, "exit", False, row)
        if is_do:
            cur = body(exited)
            families += tag(cur, "iter=1", 1)
            for j in range(2, K + 1):
                cur = body(enter(cur))
                families += tag(cur, f"iter={j}", j)
        else:
            cur = exited
            families += tag(cur, "iter=0", 0)
            for j in range(1, K + 1):
                cur = enter(body(cur))
                families += tag(cur, f"iter={j}", j)
        if has_ret:
            cur = body([], ctx)
            cur = cur if is_do else enter(cur)
            families += tag(cur, "return@1", K + 1)
            for m in range(2, K + 1):
                cur = body(enter(cur)) if is_do else enter(body(cur))
                families += tag(cur, f"return@{m}", K + m)
        # sentinel: states from which the loop runs at least K+1 iterations
        blank = [Pair(sentinel=True)]
        if is_do:
            sent = body(enter(blank))
            for _ in range(K - 1):
                sent = body(enter(sent))
        else:
            sent = enter(blank)
            for _ in range(K):
                sent = enter(body(sent))
        families += sent
        if fresh:
            families = [replace(p, fresh=p.fresh | frozenset(fresh)) for p in families]
        return families

    # -- calls -------------------------------------------------------------
    def reverse_call(self, s, pairs, ctx, name, args, target):
        if name in ctx.stack:
            raise RecursiveCall(f"line {s.line}: recursive call to {name!r} is not supported")
        try:
            f = self.program.function(name)
        except KeyError:
            raise UnknownCallee(f"line {s.line}: unknown function {name!r}") from None
        if len(args) != len(f.params):
            raise AnalysisError(f"line {s.line}: {name} expects {len(f.params)} arguments")
        k = next(self._calls)
        prefix = f"{name}@{k}."
        scope = {}
        for p, a in zip(f.params, args):
            if p.by_ref or p.is_array:
                if not isinstance(a, Name):
                    raise AnalysisError(f"line {s.line}: argument for {p.name!r} must be a variable")
                scope[p.name] = ctx.sym(a.id)
            else:
                scope[p.name] = prefix + p.name
        text = _stmt_text(s)
        post = [p.note(s.line, text, "return") for p in pairs]
        if target is not None:
            if isinstance(target, Index):
                raise AnalysisError(f"line {s.line}: call result must be stored in a scalar")
            tsym = ctx.sym(target.id)

            def ret(poly):
                if poly is None:
                    return []
                return self._apply(post, _var_fn(tsym, poly), {tsym})
        else:
            def ret(poly):
                return list(post)
        void = f.rtype == "void" or not any(isinstance(x, Return) for x in walk(f.body))
        tail = list(post) if void and target is None else []
        inner = Ctx(f, scope, prefix, ret, ctx.stack + (name,))
        pre = self.back(f.body, tail, inner)
        fresh: set = set()
        for p, a in zip(f.params, args):
            if not (p.by_ref or p.is_array):
                sym = prefix + p.name
                pre = self._apply(pre, _var_fn(sym, self.poly(a, ctx, fresh)), {sym}, frozenset(fresh))
        return self._guard([p.note(s.line, text, "call") for p in pre])

    # -- entry point -------------------------------------------------------
    def seeds(self, f: FunctionDecl, out_spec: str | None, void: bool) -> list[Pair]:
        outs = []
        if not void:
            outs.append(("ret", Poly.var(RET)))
        spec = None
        if out_spec and out_spec.strip() not in ("", "any"):
            spec = parse_spec(out_spec)
            tracked = {n for n, _ in outs}
            for e in walk_expr(spec):
                if isinstance(e, Name) and e.id != "ret" and e.id not in tracked:
                    outs.append((e.id, Poly.var(e.id)))
                    tracked.add(e.id)
                if isinstance(e, Name) and e.id == "ret" and void:
                    raise AnalysisError(f"{f.name} returns no value; 'ret' is undefined")
        base = Pair(outputs=tuple(outs))
        if spec is None:
            return [base]
        ctx = Ctx(f, {"ret": RET}, "", lambda poly: [])
        return [q for conj in self.pos(spec, ctx) if (q := base.add(conj, 0, "out", True)) is not None]

    def run(self, out_spec: str | None = "any", func: str | None = None,
            assume: str | None = None) -> "Analysis":
        f = self.program.function(func)
        void = f.rtype == "void" or not any(isinstance(x, Return) for x in walk(f.body))
        seeds = self.seeds(f, out_spec, void)

        def ret(poly):
            if poly is None:
                return list(seeds) if void else []
            return self._apply(seeds, _var_fn(RET, poly), {RET})

        ctx = _entry_ctx(self, f, ret)
        tail = list(seeds) if void else []
        try:
            pairs = self.back(f.body, tail, ctx)
        except _Budget:
            self.truncated = True
            self.reasons.append("budget")
            return Analysis(self.program, f, [], True, ["budget"], self.growth_rows(),
                            self.created, out_spec or "any", str(self.policy))
        if assume:
            actx = Ctx(f, {}, "", lambda poly: [])
            dnf = self.pos(parse_spec(assume), actx)
            pairs = [q for p in pairs for conj in dnf
                     if (q := p.add(conj, 0, "assume", True)) is not None]
        histories = []
        pairs = [q for p in pairs for q in _lift_ites(p)]
        for p in _dedupe(pairs):
            if p.sentinel:
                if solve.check(p.preds()) != solve.EMPTY:
                    self.truncated = True
                    if "unroll" not in self.reasons:
                        self.reasons.append("unroll")
                continue
            status = solve.check(p.preds())
            if status == solve.EMPTY:
                continue
            histories.append(_history(p, f, "feasible" if status == solve.NONEMPTY else "unknown"))
        histories.sort(key=History.sort_key)
        for i, h in enumerate(histories, 1):
            h.index = i
        return Analysis(self.program, f, histories, self.truncated, list(self.reasons),
                        self.growth_rows(), self.created, out_spec or "any", str(self.policy))

    def growth_rows(self) -> list[GrowthRow]:
        return sorted(self.growth.values(), key=lambda r: r.line)


def _find_ite(p: Poly):
    for a in p.atoms():
        if isinstance(a, Ite):
            return a
        inner = ()
        if isinstance(a, Read):
            inner = (a.index,)
        elif isinstance(a, Op):
            inner = (a.left, a.right)
        elif isinstance(a, Truth):
            inner = (a.pred.poly,)
        for q in inner:
            hit = _find_ite(q)
            if hit is not None:
                return hit
    return None


def _lift_ites(p: Pair, limit: int = 64) -> list:
    """Case-split on if-then-else terms left by array stores."""
    todo, done = [p], []
    while todo:
        q = todo.pop()
        ite = None
        for poly in [c.pred.poly for c in q.conds] + [o for _, o in q.outputs]:
            ite = _find_ite(poly)
            if ite is not None:
                break
        if ite is None or len(done) + len(todo) >= limit:
            done.append(q)
            continue
        for branch, rep in ((True, ite.then), (False, ite.other)):
            r = q.subst(lambda a, ite=ite, rep=rep: rep if a == ite else None)
            if r is None:
                continue
            r = r.add([ite.cond if branch else ite.cond.negate()], 0, "store", branch)
            if r is not None and not solve.refute(r.preds()):
                todo.append(r)
    done.reverse()
    return done


def _defined(p: Program, name: str) -> bool:
    return any(f.name == name for f in p.functions)


def _clean(dnf: list[list[Pred]]) -> list[list[Pred]]:
    out = []
    for conj in dnf:
        if any(p.truth() is False for p in conj):
            continue
        c = []
        for p in conj:
            if p.truth() is None and p not in c:
                c.append(p)
        out.append(c)
    return out


def _dedupe(pairs: list) -> list:
    seen = set()
    out = []
    for p in pairs:
        k = p.key()
        if k in seen:
            continue
        seen.add(k)
        out.append(p)
    return out


def _swap_idiom(stmts):
    """``t = A[i]; A[i] = A[p]; A[p] = t`` (scalars too) -> (cell_i, cell_p, t)."""
    if len(stmts) != 3:
        return None
    a, b, c = stmts
    if isinstance(a, Decl) and not a.is_array and a.init is not None:
        t, first = a.name, a.init
    elif isinstance(a, Assign) and isinstance(a.target, Name):
        t, first = a.target.id, a.value
    else:
        return None
    if not (isinstance(b, Assign) and isinstance(c, Assign)):
        return None
    if not isinstance(first, (Name, Index)) or b.target != first:
        return None
    if not isinstance(b.value, (Name, Index)) or c.target != b.value or c.value != Name(t):
        return None
    if first == b.value or t in _names(first) | _names(b.value):
        return None
    # the indices must not be changed by the swap itself
    arrays = {x.array for x in (first, b.value) if isinstance(x, Index)}
    scalars = {x.id for x in (first, b.value) if isinstance(x, Name)}
    for x in (first, b.value):
        if isinstance(x, Index) and (_names(x.index) & (arrays | scalars)):
            return None
    return (first, b.value, t)


def _names(e: Expr) -> set[str]:
    out = set()
    for x in walk_expr(e):
        if isinstance(x, Name):
            out.add(x.id)
        elif isinstance(x, Index):
            out.add(x.array)
    return out


# -- affine loop summary -------------------------------------------------

@dataclass
class _Summary:
    stmt: Stmt
    counters: dict  # sym -> step (Fraction)
    accums: dict  # sym -> (alpha: {counter: (coef, delta)}, beta: Poly)
    cond: Pred
    is_do: bool

    def state(self, m: Poly) -> Callable:
        reps = {x: Poly.var(x) + m * c for x, c in self.counters.items()}
        return lambda a: reps.get(a.name) if isinstance(a, Var) else None

    def closed(self, j: Poly) -> Callable:
        reps = {x: Poly.var(x) + j * c for x, c in self.counters.items()}
        tri = j * (j - 1) * Fraction(1, 2)
        for s, (alpha, beta) in self.accums.items():
            v = Poly.var(s) + j * beta
            for x, (coef, delta) in alpha.items():
                step = self.counters[x]
                v = v + (j * (Poly.var(x) + delta) + tri * step) * coef
            reps[s] = v
        return lambda a: reps.get(a.name) if isinstance(a, Var) else None

    def apply(self, eng: Engine, pairs, row):
        s = self.stmt
        text = _stmt_text(s)
        c0 = self.cond.subst(self.state(Poly.const(0)))
        names = set(self.counters) | set(self.accums)
        out = []

        def fam(label, code, reps, preds, jname=None):
            for p in pairs:
                q = p.subst(reps) if _mentions(p, names) else p
                if q is None:
                    continue
                q = q.add(preds, s.line, "summary", True)
                row.created += 1
                if q is None or eng._refute(q):
                    row.pruned += 1
                    continue
                if jname is not None:
                    q = _eliminate(q, jname)
                out.append(q.decide(Decision(s.sid, s.line, label, code)).note(s.line, text, label))

        if not self.is_do:
            fam("iter=0", 0, lambda a: None, [c0.negate()])
            lo = 1
        else:
            one = Poly.const(1)
            fam("iter=1", 1, self.closed(one), [self.cond.subst(self.state(one)).negate()])
            lo = 2
        jname = f"j@{s.line}#{next(eng._fresh)}"
        j = Poly.var(jname)
        first = self.cond.subst(self.state(Poly.const(lo - 1)))
        preds = [Pred.cmp(">=", j, lo), first,
                 self.cond.subst(self.state(j - 1)),
                 self.cond.subst(self.state(j)).negate()]
        fam("iter=j", lo, self.closed(j), preds, jname)
        return out


def _eliminate(p: Pair, jname: str) -> Pair:
    """Substitute ``j`` when a lower bound and an upper bound coincide."""
    lows, highs = [], []
    jv = Var(jname)
    for c in p.conds:
        q = c.pred
        if q.op != "<=" or q.poly.degree_in(jname) != 1:
            continue
        lin = q.poly.linear()
        if lin is None:
            continue
        coef = lin[0].get(jv)
        if coef == 1:
            highs.append(-(q.poly - Poly.var(jname)))
        elif coef == -1:
            lows.append(q.poly + Poly.var(jname))
    for lo in lows:
        for hi in highs:
            if lo == hi:
                q = p.subst(_var_fn(jname, lo))
                if q is not None:
                    return q
    return replace(p, fresh=p.fresh | {jname})


def affine_summary(eng: Engine, s: Stmt, ctx: Ctx) -> Optional[_Summary]:
    """Closed form for loops of counters ``x = x + c`` and accumulators
    ``s = s + linear(counters, invariants)`` under a linear exit test."""
    if not isinstance(s.cond, Compare) or s.cond.op in ("==", "!="):
        return None
    stmts = s.body.stmts
    if not stmts or not all(isinstance(x, Assign) and isinstance(x.target, Name) for x in stmts):
        return None
    for x in stmts:
        if any(isinstance(e, (Rand, CallExpr)) for e in walk_expr(x.value)):
            return None
    targets = [ctx.sym(x.target.id) for x in stmts]
    if len(set(targets)) != len(targets):
        return None
    fresh: set = set()
    diffs = {}
    for x, t in zip(stmts, targets):
        diffs[t] = eng.poly(x.value, ctx, fresh) - Poly.var(t)
    counters = {t: d.constant for t, d in diffs.items() if d.is_const()}
    order = {t: i for i, t in enumerate(targets)}
    accums = {}
    for t, d in diffs.items():
        if t in counters:
            continue
        lin = d.linear()
        if lin is None:
            return None
        alpha, beta = {}, Poly.const(lin[1])
        for a, coef in lin[0].items():
            if not isinstance(a, Var) or a.name == t:
                return None
            if a.name in counters:
                delta = counters[a.name] if order[a.name] < order[t] else 0
                alpha[a.name] = (coef, delta)
            elif a.name in targets:
                return None
            else:
                beta = beta + Poly.var(a.name) * coef
        accums[t] = (alpha, beta)
    cond = Pred.cmp(s.cond.op, eng.poly(s.cond.left, ctx, fresh), eng.poly(s.cond.right, ctx, fresh))
    lin = cond.poly.linear()
    if lin is None or fresh:
        return None
    for a in lin[0]:
        if not isinstance(a, Var) or a.name in accums:
            return None
    return _Summary(s, counters, accums, cond, isinstance(s, DoWhile))


# -- histories -----------------------------------------------------------

def describe_output(name: str, p: Poly) -> str:
    """``Z_{ret,+1}``-style text when ``p`` is a variable plus a constant."""
    lin = p.linear()
    if lin is not None and len(lin[0]) == 1:
        (a, coef), = lin[0].items()
        if isinstance(a, Var) and coef == 1 and lin[1].denominator == 1:
            shift = -int(lin[1])
            if shift == 0:
                return f"{a.name}: Z_{name}"
            return f"{a.name}: Z_{{{name},{shift:+d}}}"
    return f"{name} = {format_poly(p)}"


@dataclass
class History:
    index: int
    decisions: tuple
    conds: tuple
    outputs: dict
    frames: list
    inputs: dict  # name -> SetExpr
    residual: list
    status: str
    fresh: tuple
    params: tuple = ()

    def sort_key(self):
        return (tuple((d.sid, d.code) for d in self.decisions),
                tuple(sorted(str(c.pred) for c in self.conds)))

    @property
    def path(self) -> list[str]:
        return [f"{d.line}:{d.label}" for d in self.decisions]

    def preds(self) -> list[Pred]:
        return [c.pred for c in self.conds]

    def witness(self, env: Mapping) -> Optional[dict]:
        """Values of the fresh symbols under which ``env`` satisfies the
        condition, or None when the input is not covered."""
        preds = self.preds()
        if not self.fresh:
            return {} if _holds(preds, env) else None
        fixed = _bind(preds, env)
        if fixed is None:
            return None
        names = list(self.fresh)
        if len(names) == 1:
            ranges = [_range_for(fixed, names[0])]
        else:
            ranges = [range(-EXIST_BOX, EXIST_BOX + 1)] * len(names)
        for vals in itertools.product(*ranges):
            e = dict(zip(names, vals))
            if _holds(fixed, e):
                return e
        return None

    def admits(self, env: Mapping) -> bool:
        return self.witness(env) is not None

    def outputs_at(self, env: Mapping) -> Optional[dict]:
        w = self.witness(env)
        if w is None:
            return None
        full = dict(env)
        full.update(w)
        return {n: p.eval_int(full) for n, p in self.outputs.items()}

    def describe_inputs(self) -> list[str]:
        out = []
        for n, s in self.inputs.items():
            if isinstance(s, S.Complement):
                out.append(f"{n} ∉ {S.to_text(s.inner)}")
            else:
                out.append(f"{n} ∈ {S.to_text(s)}")
        out += [str(p) for p in self.residual]
        return out

    def describe_outputs(self) -> list[str]:
        return [f"{n} = {format_poly(p)}" for n, p in self.outputs.items()]

    def __str__(self):
        return (f"H{self.index}: " + ", ".join(self.describe_inputs())
                + " -> " + ", ".join(self.describe_outputs()))


def _holds(preds, env) -> bool:
    try:
        return all(p.compiled()(env) for p in preds)
    except (Unbound, IndexError, ZeroDivisionError, ValueError, TypeError):
        return False


def _bind(preds, env) -> Optional[list]:
    def fn(a):
        if isinstance(a, Var) and a.name in env:
            return Poly.const(env[a.name])
        if isinstance(a, Read) and a.array in env:
            iv = a.index.const_value()
            if iv is None:
                return None
            arr = env[a.array]
            if not 0 <= iv < len(arr):
                raise IndexError(a.array)
            return Poly.const(arr[int(iv)])
        return None
    try:
        out = []
        for p in preds:
            q = p.subst(fn)
            t = q.truth()
            if t is False:
                return None
            if t is None:
                out.append(q)
        return out
    except (IndexError, ZeroDivisionError):
        return None


def _range_for(preds, name):
    try:
        b = solve.project_interval([p for p in preds if name in p.free_vars()], name)
    except ValueError:
        b = (None, None)
    if b is None:
        return range(0)
    lo = b[0] if b[0] is not None else -EXIST_SPAN
    hi = b[1] if b[1] is not None else EXIST_SPAN
    if b[0] is None and b[1] is not None:
        lo = hi - 2 * EXIST_SPAN
    if b[1] is None and b[0] is not None:
        hi = lo + 2 * EXIST_SPAN
    return range(lo, hi + 1)


def characterize(preds: list[Pred], inputs: list[str], fresh: Iterable[str] = ()):
    """Per-input set view of a condition; leftovers are returned as residual."""
    fresh = set(fresh)
    sets: dict[str, list] = {n: [] for n in inputs}
    residual = []
    for p in preds:
        names = p.free_vars()
        lin = p.poly.linear()
        if (lin is None or names & fresh or p.poly.arrays()
                or not all(isinstance(a, Var) for a in lin[0]) or not names <= set(inputs)):
            residual.append(p)
            continue
        coeffs, const = lin
        if p.op == "<=" and len(coeffs) == 1:
            (a, c), = coeffs.items()
            bound = -const / c
            if c > 0:
                sets[a.name].append(S.Interval(None, int(bound // 1)))
            else:
                sets[a.name].append(S.Interval(-int((-bound) // 1), None))
            continue
        units = sorted(a.name for a, c in coeffs.items() if abs(c) == 1)
        if p.op in ("==", "!=") and units:
            t = units[-1]
            c = coeffs[Var(t)]
            rest = p.poly - Poly.var(t) * c
            rel = S.LinearRelation.of(t, -rest * c) if rest.linear()[0] else None
            if rel is None:
                v = int(-rest.constant * c)
                base = S.Finite((v,))
            else:
                base = rel
            sets[t].append(base if p.op == "==" else S.Complement(base))
            continue
        residual.append(p)
    out = {}
    for n in inputs:
        parts = _merge_intervals(sets[n])
        if not parts:
            out[n] = S.AllIntegers(n)
        else:
            out[n] = S.normalize(S.Intersection(tuple(parts))) if len(parts) > 1 else parts[0]
    return out, residual


def _merge_intervals(parts: list) -> list:
    ivs = [p for p in parts if isinstance(p, S.Interval)]
    if len(ivs) < 2:
        return parts
    los = [i.lo for i in ivs if i.lo is not None]
    his = [i.hi for i in ivs if i.hi is not None]
    lo, hi = (max(los) if los else None), (min(his) if his else None)
    merged = S.Finite((lo,)) if lo is not None and lo == hi else S.Interval(lo, hi)
    return [merged] + [p for p in parts if not isinstance(p, S.Interval)]


def _history(p: Pair, f: FunctionDecl, status: str) -> History:
    frames = []
    node = p.frames
    while node is not None:
        frames.append(node[0])
        node = node[1]
    frames.reverse()
    scalars = [prm.name for prm in f.params if not prm.is_array]
    inputs, residual = characterize(p.preds(), scalars, p.fresh)
    return History(0, p.decisions, p.conds, dict(p.outputs), frames, inputs, residual,
                   status, tuple(sorted(p.fresh)), tuple(prm.name for prm in f.params))


@dataclass
class Analysis:
    program: Program
    func: FunctionDecl
    histories: list
    truncated: bool
    reasons: list
    growth: list
    pairs_created: int
    out_spec: str
    policy: str

    def __iter__(self):
        return iter(self.histories)

    def __len__(self):
        return len(self.histories)

    def covering(self, env: Mapping) -> list[History]:
        return [h for h in self.histories if h.admits(env)]


# -- public operations ---------------------------------------------------

def analyze_backward(p: Program, out_spec: str | None = "any", policy: LoopPolicy | None = None,
                     budget: int = DEFAULT_BUDGET, func: str | None = None,
                     assume: str | None = None) -> Analysis:
    """All backward histories of ``func`` (default: the entry function)
    whose output satisfies ``out_spec`` (an expression over ``ret`` and
    variables, or ``any``)."""
    return Engine(p, policy, budget).run(out_spec, func, assume)


def _standalone(f: Frontier, program: Program | None = None):
    eng = Engine(program or Program(()))
    return eng, _entry_ctx(eng, None)


def reverse_assign(stmt: Stmt, f: Frontier) -> Frontier:
    eng, ctx = _standalone(f)
    return Frontier(eng.reverse_assign(stmt, f.pairs, ctx), f.truncated)


def reverse_swap(cell_i: Expr, cell_p: Expr, f: Frontier, temp: str | None = None) -> Frontier:
    eng, ctx = _standalone(f)
    cells = (cell_i, cell_p) + ((temp,) if temp else ())
    return Frontier(eng.reverse_swap(cells, f.pairs, ctx, [CallStmt("swap", (cell_i, cell_p))]),
                    f.truncated)


def reverse_if(stmt: If, f: Frontier, program: Program | None = None) -> Frontier:
    eng, ctx = _standalone(f, program)
    return Frontier(eng.reverse_if(desugar_stmt(stmt), f.pairs, ctx), f.truncated)


def reverse_loop(stmt: Stmt, f: Frontier, policy: LoopPolicy | None = None,
                 program: Program | None = None) -> Frontier:
    eng, ctx = _standalone(f, program)
    eng.policy = policy or LoopPolicy()
    pairs = eng.reverse_loop(desugar_stmt(stmt), f.pairs, ctx)
    sentinels = [p for p in pairs if p.sentinel]
    truncated = f.truncated or any(solve.check(p.preds()) != solve.EMPTY for p in sentinels)
    return Frontier([p for p in pairs if not p.sentinel], truncated)


def reverse_call(stmt: CallStmt, f: Frontier, program: Program) -> Frontier:
    eng, ctx = _standalone(f, program)
    return Frontier(eng.back(stmt, f.pairs, ctx), f.truncated)


def desugar_stmt(s: Stmt) -> Stmt:
    f = FunctionDecl("_", "void", (), Block(stmts=(s,)))
    return desugar(Program((f,))).functions[0].body.stmts[0]


def growth_report(a: Analysis) -> dict:
    """Per conditional line: pairs in, created, pruned, out; plus the final count."""
    rows = [{
        "line": r.line, "kind": r.kind, "visits": r.visits, "in": r.pairs_in,
        "created": r.created, "pruned": r.pruned, "out": r.pairs_out,
        "factor": round(r.factor, 3), "exponential": r.flagged,
    } for r in a.growth]
    return {"lines": rows, "histories": len(a.histories), "pairs_created": a.pairs_created}


__all__ = [
    "LoopPolicy", "Unroll", "AffineSummary", "Cond", "Decision", "HFrame", "Pair",
    "Frontier", "GrowthRow", "Engine", "History", "Analysis", "AnalysisError",
    "UnknownCallee", "RecursiveCall", "analyze_backward", "reverse_assign",
    "reverse_swap", "reverse_if", "reverse_loop", "reverse_call", "growth_report",
    "characterize", "describe_output", "parse_spec", "affine_summary",
    "DEFAULT_BUDGET", "DEFAULT_UNROLL",
]
