"""Lowering to the core language: no ``for``, no ``x++``/``x op= e``."""
from __future__ import annotations

import itertools
from dataclasses import replace

from .ast import (
    Assign, AugAssign, BinOp, Block, DoWhile, For, If, Num,
    Program, Stmt, While, walk,
)


def desugar(p: Program) -> Program:
    """Return an equivalent core program; line labels follow their origin."""
    top = max((s.sid for s in p.statements()), default=0)
    fresh = itertools.count(top + 1)
    funcs = tuple(replace(f, body=_block(f.body, fresh)) for f in p.functions)
    out = Program(funcs)
    return p if out == p else out


def _block(b: Block, fresh) -> Block:
    stmts = []
    for s in b.stmts:
        stmts.append(_stmt(s, fresh))
    return replace(b, stmts=tuple(stmts))


def _stmt(s: Stmt, fresh) -> Stmt:
    if isinstance(s, AugAssign):
        return Assign(s.target, BinOp(s.op, s.target, s.value), line=s.line, sid=s.sid)
    if isinstance(s, Block):
        return _block(s, fresh)
    if isinstance(s, If):
        orelse = _block(s.orelse, fresh) if s.orelse is not None else None
        return replace(s, then=_block(s.then, fresh), orelse=orelse)
    if isinstance(s, While):
        return replace(s, body=_block(s.body, fresh))
    if isinstance(s, DoWhile):
        return replace(s, body=_block(s.body, fresh))
    if isinstance(s, For):
        body = _block(s.body, fresh)
        if s.step is not None:
            body = replace(body, stmts=body.stmts + (_stmt(s.step, fresh),))
        cond = s.cond if s.cond is not None else Num(1)
        loop = While(cond, body, line=s.line, sid=s.sid)
        stmts = ((_stmt(s.init, fresh),) if s.init is not None else ()) + (loop,)
        return Block(stmts=stmts, line=s.line, sid=next(fresh))
    return s


def is_desugared(p: Program) -> bool:
    return not any(isinstance(s, (For, AugAssign)) for f in p.functions for s in walk(f.body))


__all__ = ["desugar", "is_desugared"]
