"""Canonical pretty-printer. ``print(parse(print(p))) == print(p)``."""
from __future__ import annotations

from .ast import (
    Assign, AugAssign, BinOp, Block, BoolOp, CallExpr, CallStmt, Compare, Decl,
    DoWhile, Expr, For, FunctionDecl, If, Index, Name, Neg, Not, Num, Program,
    Rand, Return, Stmt, While,
)

_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "<": 7, "<=": 7, ">": 7, ">=": 7,
    "+": 8, "-": 8, "*": 9, "/": 9, "%": 9,
}
_UNARY = 10


def _prec(e: Expr) -> int:
    if isinstance(e, (BinOp, Compare, BoolOp)):
        return _PREC[e.op]
    if isinstance(e, (Not, Neg)):
        return _UNARY
    if isinstance(e, Num) and e.value < 0:
        return _UNARY
    return 11


def format_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Index):
        return f"{e.array}[{format_expr(e.index)}]"
    if isinstance(e, Rand):
        return "rand()"
    if isinstance(e, CallExpr):
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, (Not, Neg)):
        inner = format_expr(e.operand)
        if _prec(e.operand) < _UNARY or (isinstance(e, Neg) and inner.startswith("-")):
            inner = f"({inner})"
        return ("!" if isinstance(e, Not) else "-") + inner
    p = _PREC[e.op]
    left = format_expr(e.left)
    right = format_expr(e.right)
    # left-associative: parenthesize a right operand of equal precedence
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def _simple(s: Stmt) -> str:
    if isinstance(s, Assign):
        return f"{format_expr(s.target)} = {format_expr(s.value)}"
    if isinstance(s, AugAssign):
        if isinstance(s.value, Num) and s.value.value == 1 and s.op in "+-":
            return f"{format_expr(s.target)}{s.op}{s.op}"
        return f"{format_expr(s.target)} {s.op}= {format_expr(s.value)}"
    if isinstance(s, CallStmt):
        return f"{s.name}({', '.join(format_expr(a) for a in s.args)})"
    if isinstance(s, Decl):
        text = f"{s.type} {s.name}"
        if s.is_array:
            text += f"[{format_expr(s.size) if s.size is not None else ''}]"
        if s.init is not None:
            text += f" = {format_expr(s.init)}"
        return text
    raise TypeError(f"not a simple statement: {type(s).__name__}")


def format_stmt(s: Stmt, indent: int = 0) -> list[str]:
    pad = "    " * indent
    if isinstance(s, Block):
        out = [pad + "{"]
        for c in s.stmts:
            out.extend(format_stmt(c, indent + 1))
        out.append(pad + "}")
        return out
    if isinstance(s, If):
        out = [f"{pad}if ({format_expr(s.cond)}) {{"]
        out += _body(s.then, indent)
        if s.orelse is not None:
            out.append(f"{pad}}} else {{")
            out += _body(s.orelse, indent)
        out.append(pad + "}")
        return out
    if isinstance(s, While):
        return [f"{pad}while ({format_expr(s.cond)}) {{", *_body(s.body, indent), pad + "}"]
    if isinstance(s, DoWhile):
        return [pad + "do {", *_body(s.body, indent), f"{pad}}} while ({format_expr(s.cond)});"]
    if isinstance(s, For):
        init = _simple(s.init) if s.init is not None else ""
        cond = format_expr(s.cond) if s.cond is not None else ""
        step = _simple(s.step) if s.step is not None else ""
        return [f"{pad}for ({init}; {cond}; {step}) {{", *_body(s.body, indent), pad + "}"]
    if isinstance(s, Return):
        return [pad + ("return;" if s.value is None else f"return {format_expr(s.value)};")]
    return [pad + _simple(s) + ";"]


def _body(b: Block, indent: int) -> list[str]:
    out = []
    for c in b.stmts:
        out.extend(format_stmt(c, indent + 1))
    return out


def format_function(f: FunctionDecl) -> str:
    params = []
    for p in f.params:
        text = p.type + " " + ("&" if p.by_ref else "") + p.name
        if p.is_array:
            text += "[]"
        params.append(text)
    lines = [f"{f.rtype} {f.name}({', '.join(params)}) {{"]
    lines += _body(f.body, 0)
    lines.append("}")
    return "\n".join(lines)


def format_program(p: Program) -> str:
    if not p.functions:
        return ""
    return "\n\n".join(format_function(f) for f in p.functions) + "\n"
