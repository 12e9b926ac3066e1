"""AST for the subject language.

Nodes are frozen dataclasses so programs can be shared freely. Statements
carry the 1-based source ``line`` they start on and a per-program ordinal
``sid`` that stays unique when two statements share a line.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Index:
    array: str
    index: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * / % ^ & |
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Compare:
    op: str  # < <= == != > >=
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class BoolOp:
    op: str  # && ||
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Rand:
    pass


@dataclass(frozen=True)
class CallExpr:
    name: str
    args: tuple["Expr", ...]


Expr = Union[Num, Name, Index, BinOp, Compare, BoolOp, Not, Neg, Rand, CallExpr]
LValue = Union[Name, Index]


@dataclass(frozen=True, kw_only=True)
class Stmt:
    line: int = 0
    sid: int = 0


@dataclass(frozen=True)
class Decl(Stmt):
    type: str
    name: str
    size: Optional[Expr] = None
    init: Optional[Expr] = None
    is_array: bool = False


@dataclass(frozen=True)
class Assign(Stmt):
    target: LValue
    value: Expr


@dataclass(frozen=True)
class AugAssign(Stmt):
    """``x op= e``, ``x++`` and ``x--`` before desugaring."""

    target: LValue
    op: str
    value: Expr


@dataclass(frozen=True)
class Block(Stmt):
    stmts: tuple[Stmt, ...] = ()


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: Block
    orelse: Optional[Block] = None


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    body: Block


@dataclass(frozen=True)
class DoWhile(Stmt):
    body: Block
    cond: Expr


@dataclass(frozen=True)
class For(Stmt):
    init: Optional[Stmt]
    cond: Optional[Expr]
    step: Optional[Stmt]
    body: Block


@dataclass(frozen=True)
class CallStmt(Stmt):
    name: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Return(Stmt):
    value: Optional[Expr] = None


@dataclass(frozen=True)
class Param:
    name: str
    type: str = "int"
    by_ref: bool = False
    is_array: bool = False


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    rtype: str
    params: tuple[Param, ...]
    body: Block
    line: int = 0


@dataclass(frozen=True)
class Program:
    functions: tuple[FunctionDecl, ...] = ()

    def function(self, name: str | None = None) -> FunctionDecl:
        """Look a function up by name; without a name, the entry function.

        The entry function is ``main`` if present, otherwise the last one
        defined (callees are conventionally written first).
        """
        if name is None:
            for f in self.functions:
                if f.name == "main":
                    return f
            if not self.functions:
                raise KeyError("program has no functions")
            return self.functions[-1]
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(f"unknown function {name!r}")

    def statements(self) -> Iterator[Stmt]:
        for f in self.functions:
            yield from walk(f.body)


def children(s: Stmt) -> tuple[Stmt, ...]:
    if isinstance(s, Block):
        return s.stmts
    if isinstance(s, If):
        return (s.then,) + ((s.orelse,) if s.orelse is not None else ())
    if isinstance(s, (While, DoWhile)):
        return (s.body,)
    if isinstance(s, For):
        return tuple(x for x in (s.init, s.step, s.body) if x is not None)
    return ()


def walk(s: Stmt) -> Iterator[Stmt]:
    yield s
    for c in children(s):
        yield from walk(c)


def expr_children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Index):
        return (e.index,)
    if isinstance(e, (BinOp, Compare, BoolOp)):
        return (e.left, e.right)
    if isinstance(e, (Not, Neg)):
        return (e.operand,)
    if isinstance(e, CallExpr):
        return e.args
    return ()


def walk_expr(e: Expr) -> Iterator[Expr]:
    yield e
    for c in expr_children(e):
        yield from walk_expr(c)


def names_read(e: Expr) -> set[str]:
    out = set()
    for sub in walk_expr(e):
        if isinstance(sub, Name):
            out.add(sub.id)
        elif isinstance(sub, Index):
            out.add(sub.array)
    return out


def assigned_vars(s: Stmt) -> set[str]:
    """Variables (arrays by name) written anywhere inside ``s``."""
    out = set()
    for sub in walk(s):
        if isinstance(sub, (Assign, AugAssign)):
            t = sub.target
            out.add(t.id if isinstance(t, Name) else t.array)
        elif isinstance(sub, Decl) and sub.init is not None:
            out.add(sub.name)
    return out


def is_core(s: Stmt) -> bool:
    return not any(isinstance(x, (For, AugAssign)) for x in walk(s))


__all__ = [
    "Num", "Name", "Index", "BinOp", "Compare", "BoolOp", "Not", "Neg", "Rand",
    "CallExpr", "Expr", "LValue", "Stmt", "Decl", "Assign", "AugAssign", "Block",
    "If", "While", "DoWhile", "For", "CallStmt", "Return", "Param",
    "FunctionDecl", "Program", "children", "walk", "walk_expr", "expr_children",
    "names_read", "assigned_vars", "is_core",
]
