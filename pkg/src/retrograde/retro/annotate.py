"""Backward (up-arrow) listings with version tags.

The listing keeps source order top to bottom while the ``N↑`` labels count
backward execution steps. Each variable carries a set of version tags;
a tag is printed only for variables that show at least two different tag
sets somewhere in the listing. Variables that are never read get opaque
``r`` labels instead of numeric versions.
"""
from __future__ import annotations

import dataclasses
import itertools
import re

from ..minilang.ast import (
    Assign, Block, CallExpr, CallStmt, Decl, DoWhile, Expr, If, Index, Name,
    Program, Return, Stmt, While, walk, walk_expr,
)
from ..minilang.desugar import desugar
from ..minilang.printer import format_expr
from .tags import VersionTag, format_tags, next_of

ARROW = "↑"
_MANY = VersionTag(("k",))
_PH = re.compile(r"@@(\d+)@@")


def _rkey(label: str):
    m = re.match(r"^r(\d+)$", label)
    if m:
        return (0, int(m.group(1)), "")
    return (1, len(label), label)


def _bump_r(label: str) -> str:
    m = re.match(r"^rk(?:\+(\d+))?$", label)
    if not m:
        raise ValueError(label)
    return f"rk+{int(m.group(1) or 0) + 1}"


class _Lister:
    def __init__(self, body: Block):
        self.counter = itertools.count(1)
        self.rows: list = []  # backward order: (label | None, indent, parts)
        self.refs: list = []  # (var, frozenset of tags)
        self.printed: dict = {}  # var -> set of rendered tag sets
        read = set()
        for s in walk(body):
            for e in _exprs(s):
                for x in walk_expr(e):
                    if isinstance(x, Name):
                        read.add(x.id)
                    elif isinstance(x, Index):
                        read.add(x.array)
        self.read = read
        self.rcount: dict = {}

    # -- tags ---------------------------------------------------------
    def is_r(self, v: str) -> bool:
        return v not in self.read

    def fresh_r(self, v: str) -> str:
        self.rcount[v] = self.rcount.get(v, 0) + 1
        return f"r{self.rcount[v]}"

    def tags(self, env: dict, v: str):
        if self.is_r(v):
            cur = env.get(v)
            if not cur:
                cur = frozenset({self.fresh_r(v)})
                env[v] = cur
            return cur
        return env.get(v, frozenset({VersionTag()}))

    def ref(self, env: dict, v: str) -> str:
        tags = self.tags(env, v)
        text = self.tag_text(v, tags)
        self.printed.setdefault(v, set()).add(text)
        self.refs.append((v, text))
        return f"@@{len(self.refs) - 1}@@"

    def tag_text(self, v: str, tags) -> str:
        if self.is_r(v):
            return "{" + ",".join(sorted(tags, key=_rkey)) + "}"
        return format_tags(tags)

    def bump(self, env: dict, v: str):
        if self.is_r(v):
            cur = self.tags(env, v)
            syms = [t for t in cur if t.startswith("rk")]
            env[v] = frozenset({_bump_r(max(syms, key=_rkey))} if syms else {self.fresh_r(v)})
        else:
            env[v] = frozenset({next_of(self.tags(env, v))})

    # -- rendering ----------------------------------------------------
    def expr(self, e: Expr, env: dict) -> str:
        def sub(x):
            if isinstance(x, Name):
                return Name(self.ref(env, x.id))
            if dataclasses.is_dataclass(x):
                changes = {}
                for f in dataclasses.fields(x):
                    val = getattr(x, f.name)
                    if isinstance(val, tuple):
                        changes[f.name] = tuple(sub(y) for y in val)
                    elif dataclasses.is_dataclass(val):
                        changes[f.name] = sub(val)
                return dataclasses.replace(x, **changes) if changes else x
            return x
        return format_expr(sub(e))

    def emit(self, indent: int, text: str, numbered: bool = True):
        label = next(self.counter) if numbered else None
        self.rows.append((label, indent, text))

    # -- statements ---------------------------------------------------
    def stmt(self, s: Stmt, env: dict, indent: int) -> dict:
        if isinstance(s, Block):
            for c in reversed(s.stmts):
                env = self.stmt(c, env, indent)
            return env
        if isinstance(s, (Assign, Decl)):
            return self.assign(s, env, indent)
        if isinstance(s, Return):
            val = "" if s.value is None else " " + self.expr(s.value, env)
            self.emit(indent, f"return{val};")
            return env
        if isinstance(s, CallStmt):
            env = dict(env)
            self.emit(indent, self.call(s.name, s.args, env) + ";")
            return env
        if isinstance(s, If):
            return self.if_(s, env, indent)
        if isinstance(s, (While, DoWhile)):
            return self.loop(s, env, indent)
        raise TypeError(type(s).__name__)

    def call(self, name, args, env) -> str:
        for a in args:
            if isinstance(a, Name):
                env[a.id] = frozenset({_MANY}) if not self.is_r(a.id) else frozenset({"rk"})
        return f"{name}({', '.join(self.expr(a, env) for a in args)})"

    def assign(self, s, env: dict, indent: int) -> dict:
        env = dict(env)
        if isinstance(s, Decl):
            head = f"{s.type} "
            target, value = s.name, s.init
            suffix = f"[{self.expr(s.size, env)}]" if s.is_array and s.size is not None else ""
        else:
            head, suffix = "", ""
            if isinstance(s.target, Index):
                target = None
                lhs = f"{s.target.array}[{self.expr(s.target.index, env)}]"
            else:
                target = s.target.id
            value = s.value
        if target is not None:
            lhs = self.ref(env, target) + suffix
            self.bump(env, target)
        if value is None:
            rhs = ""
        elif isinstance(value, CallExpr):
            rhs = " = " + self.call(value.name, value.args, env)
        else:
            rhs = " = " + self.expr(value, env)
        self.emit(indent, f"{head}{lhs}{rhs};")
        return env

    def if_(self, s: If, env: dict, indent: int) -> dict:
        assigned = _assigned(s)
        skip = dict(env)
        for v in assigned:
            if not self.is_r(v):
                skip[v] = frozenset(t.split(1) for t in self.tags(env, v))
        if s.orelse is not None:
            self.emit(indent, "} (!" + self._cond(s.cond, skip) + ")", numbered=False)
            skip = self.stmt(s.orelse, skip, indent + 1)
            self.emit(indent, "{")
        then_cond = None
        then_env = dict(env)
        # closing line comes first in backward order
        close_at = len(self.rows)
        self.rows.append(None)
        then_env = self.stmt(s.then, then_env, indent + 1)
        then_cond = self._cond(s.cond, then_env)
        self.rows[close_at] = (None, indent, "} (" + then_cond + ")")
        self.emit(indent, "{")
        out = dict(env)
        for v in set(then_env) | set(skip) | assigned:
            if v not in assigned:
                out[v] = then_env.get(v, env.get(v))
                continue
            if self.is_r(v):
                out[v] = frozenset({self.fresh_r(v), self.fresh_r(v)})
            else:
                out[v] = self.tags(then_env, v) | self.tags(skip, v)
        return out

    def _cond(self, e: Expr, env: dict) -> str:
        return self.expr(e, env)

    def loop(self, s, env: dict, indent: int) -> dict:
        assigned = _assigned(s)
        is_do = isinstance(s, DoWhile)
        exit_env = dict(env)
        self.emit(indent, "(!" + self._cond(s.cond, exit_env) + ")")
        # entered once
        close_at = len(self.rows)
        self.rows.append((None, indent, "}"))
        once = self.stmt(s.body, dict(exit_env), indent + 1)
        self.emit(indent, "(" + self._cond(s.cond, once) + "){")
        # entered many times: symbolic k inside the loop
        many = dict(exit_env)
        for v in assigned:
            many[v] = frozenset({"rk"}) if self.is_r(v) else frozenset({_MANY})
        many = self.stmt(s.body, many, indent + 1)
        self.emit(indent, "(" + self._cond(s.cond, many) + "){...")
        del close_at
        out = dict(env)
        for v in assigned:
            if self.is_r(v):
                out[v] = self.tags(many, v)
                continue
            parts = set()
            if not is_do:
                parts |= {t.split(1) for t in self.tags(exit_env, v)}
            parts |= set(self.tags(once, v))
            parts |= {_outside(t) for t in self.tags(many, v)}
            out[v] = frozenset(parts)
        return out

    # -- output -------------------------------------------------------
    def render(self) -> str:
        rows = list(reversed(self.rows))
        width = max((len(f"{r[0]}{ARROW}") for r in rows if r[0] is not None), default=0)
        lines = []
        for label, indent, text in rows:
            text = _PH.sub(lambda m: self._show(int(m.group(1))), text)
            head = f"{label}{ARROW}".rjust(width) if label is not None else " " * width
            lines.append(f"{head} {'  ' * indent}{text}".rstrip())
        return "\n".join(lines)

    def _show(self, i: int) -> str:
        v, text = self.refs[i]
        return v + text if len(self.printed.get(v, ())) >= 2 else v


def _outside(t: VersionTag) -> VersionTag:
    """``k+1`` inside the loop is ``K+1`` once the loop is left."""
    return VersionTag(tuple(c.replace("k", "K") if isinstance(c, str) else c for c in t.path))


def _exprs(s: Stmt) -> list:
    if isinstance(s, Assign):
        out = [s.value]
        if isinstance(s.target, Index):
            out.append(s.target.index)
        return out
    if isinstance(s, Decl):
        return [x for x in (s.init, s.size) if x is not None]
    if isinstance(s, (If, While, DoWhile)):
        return [s.cond]
    if isinstance(s, CallStmt):
        return list(s.args)
    if isinstance(s, Return):
        return [s.value] if s.value is not None else []
    return []


def _assigned(s: Stmt) -> set:
    out = set()
    for x in walk(s):
        if isinstance(x, Assign):
            out.add(x.target.id if isinstance(x.target, Name) else x.target.array)
        elif isinstance(x, Decl):
            out.add(x.name)
        elif isinstance(x, CallStmt):
            out |= {a.id for a in x.args if isinstance(a, Name)}
        for e in _exprs(x):
            for sub in walk_expr(e):
                if isinstance(sub, CallExpr):
                    out |= {a.id for a in sub.args if isinstance(a, Name)}
    return out


def annotate(p: Program, func: str | None = None) -> str:
    """Annotated backward listing of ``func`` (default: the entry function)."""
    if not p.functions:
        return ""
    body = desugar(p).function(func).body
    lister = _Lister(body)
    lister.stmt(body, {}, 0)
    return lister.render()


__all__ = ["annotate", "ARROW"]
