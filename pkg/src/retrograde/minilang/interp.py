"""Concrete forward interpreter.

This is the oracle every backward result is replayed against, so it stays
deliberately plain: C-like integer semantics (division and ``%`` truncate
toward zero), explicit ``rand()`` outcomes supplied by a script, bounds
checked array access and a step budget.
"""
from __future__ import annotations

import copy
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .ast import (
    Assign, AugAssign, BinOp, Block, BoolOp, CallExpr, CallStmt, Compare, Decl,
    DoWhile, Expr, For, FunctionDecl, If, Index, Name, Neg, Not, Num, Program,
    Rand, Return, Stmt, While,
)

DEFAULT_STEP_BUDGET = 1_000_000


class EvalError(Exception):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class OutOfBounds(EvalError):
    def __init__(self, array: str, index: int, length: int, line: int):
        self.array = array
        self.index = index
        self.length = length
        super().__init__(f"index {index} out of bounds for {array}[{length}]", line)


class BudgetExceeded(EvalError):
    pass


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


def c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def c_mod(a: int, b: int) -> int:
    return a - b * c_div(a, b)


def wrap(v: int, width: Optional[int]) -> int:
    if width is None:
        return v
    m = 1 << width
    v &= m - 1
    return v - m if v >= m >> 1 else v


class Frame:
    """Variable storage for one activation; by-reference params alias a caller slot."""

    def __init__(self, func: str):
        self.func = func
        self.vars: dict[str, object] = {}
        self.alias: dict[str, tuple["Frame", str]] = {}

    def resolve(self, name: str) -> tuple["Frame", str]:
        frame = self
        while name in frame.alias:
            frame, name = frame.alias[name]
        return frame, name


@dataclass
class EvalResult:
    ret: Optional[int]
    env: dict
    visits: Counter = field(default_factory=Counter)
    accesses: list = field(default_factory=list)
    steps: int = 0
    rand_used: int = 0


WriteHook = Callable[[int, Frame, str, Optional[int], object], None]


class Interpreter:
    def __init__(
        self,
        program: Program,
        rng_script: Sequence[int] = (),
        step_budget: int = DEFAULT_STEP_BUDGET,
        width: Optional[int] = None,
        on_write: Optional[WriteHook] = None,
    ):
        self.program = program
        self.rng = list(rng_script)
        self.rng_pos = 0
        self.budget = step_budget
        self.width = width
        self.on_write = on_write
        self.visits: Counter = Counter()
        self.accesses: list = []
        self.steps = 0

    # -- storage -------------------------------------------------------
    def _read_var(self, frame: Frame, name: str, line: int):
        f, n = frame.resolve(name)
        if n not in f.vars:
            raise EvalError(f"undeclared variable {name!r}", line)
        return f.vars[n]

    def _write_var(self, frame: Frame, name: str, value, line: int):
        f, n = frame.resolve(name)
        if self.on_write is not None:
            self.on_write(line, f, n, None, f.vars.get(n, _MISSING))
        f.vars[n] = value

    def _array(self, frame: Frame, name: str, line: int) -> list:
        arr = self._read_var(frame, name, line)
        if not isinstance(arr, list):
            raise EvalError(f"{name!r} is not an array", line)
        return arr

    def _read_cell(self, frame, name, idx, line):
        arr = self._array(frame, name, line)
        self.accesses.append((line, name, idx, "r"))
        if not 0 <= idx < len(arr):
            raise OutOfBounds(name, idx, len(arr), line)
        return arr[idx]

    def _write_cell(self, frame, name, idx, value, line):
        arr = self._array(frame, name, line)
        self.accesses.append((line, name, idx, "w"))
        if not 0 <= idx < len(arr):
            raise OutOfBounds(name, idx, len(arr), line)
        if self.on_write is not None:
            f, n = frame.resolve(name)
            self.on_write(line, f, n, idx, arr[idx])
        arr[idx] = value

    # -- expressions ---------------------------------------------------
    def eval(self, e: Expr, frame: Frame, line: int) -> int:
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Name):
            v = self._read_var(frame, e.id, line)
            if isinstance(v, list):
                raise EvalError(f"array {e.id!r} used as a scalar", line)
            return v
        if isinstance(e, Index):
            return self._read_cell(frame, e.array, self.eval(e.index, frame, line), line)
        if isinstance(e, BinOp):
            a = self.eval(e.left, frame, line)
            b = self.eval(e.right, frame, line)
            return wrap(self._binop(e.op, a, b, line), self.width)
        if isinstance(e, Compare):
            a = self.eval(e.left, frame, line)
            b = self.eval(e.right, frame, line)
            return int(_CMP[e.op](a, b))
        if isinstance(e, BoolOp):
            a = self.eval(e.left, frame, line)
            if e.op == "&&":
                return int(bool(a) and bool(self.eval(e.right, frame, line)))
            return int(bool(a) or bool(self.eval(e.right, frame, line)))
        if isinstance(e, Not):
            return int(not self.eval(e.operand, frame, line))
        if isinstance(e, Neg):
            return wrap(-self.eval(e.operand, frame, line), self.width)
        if isinstance(e, Rand):
            if self.rng_pos >= len(self.rng):
                raise EvalError("rng_script exhausted", line)
            v = self.rng[self.rng_pos]
            self.rng_pos += 1
            return v
        if isinstance(e, CallExpr):
            v = self.call(e.name, e.args, frame, line)
            if v is None:
                raise EvalError(f"void function {e.name!r} used as a value", line)
            return v
        raise TypeError(type(e).__name__)

    @staticmethod
    def _binop(op: str, a: int, b: int, line: int) -> int:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op in ("/", "%"):
            if b == 0:
                raise EvalError("division by zero", line)
            return c_div(a, b) if op == "/" else c_mod(a, b)
        if op == "^":
            return a ^ b
        if op == "&":
            return a & b
        if op == "|":
            return a | b
        raise EvalError(f"unknown operator {op}", line)

    # -- statements ----------------------------------------------------
    def tick(self, s: Stmt):
        self.steps += 1
        self.visits[s.line] += 1
        if self.steps > self.budget:
            raise BudgetExceeded(f"step budget {self.budget} exceeded", s.line)

    def exec(self, s: Stmt, frame: Frame):
        if isinstance(s, Block):
            for c in s.stmts:
                self.exec(c, frame)
            return
        self.tick(s)
        if isinstance(s, Decl):
            if s.is_array:
                size = self.eval(s.size, frame, s.line) if s.size is not None else 0
                if size < 0:
                    raise EvalError(f"negative array size {size}", s.line)
                self._write_var(frame, s.name, [0] * size, s.line)
            else:
                v = self.eval(s.init, frame, s.line) if s.init is not None else 0
                self._write_var(frame, s.name, v, s.line)
        elif isinstance(s, Assign):
            v = self.eval(s.value, frame, s.line)
            self._store(s.target, v, frame, s.line)
        elif isinstance(s, AugAssign):
            cur = self.eval(s.target, frame, s.line)
            v = wrap(self._binop(s.op, cur, self.eval(s.value, frame, s.line), s.line), self.width)
            self._store(s.target, v, frame, s.line)
        elif isinstance(s, If):
            if self.eval(s.cond, frame, s.line):
                self.exec(s.then, frame)
            elif s.orelse is not None:
                self.exec(s.orelse, frame)
        elif isinstance(s, While):
            while self.eval(s.cond, frame, s.line):
                self.exec(s.body, frame)
                self.tick(s)
        elif isinstance(s, DoWhile):
            while True:
                self.exec(s.body, frame)
                self.tick(s)
                if not self.eval(s.cond, frame, s.line):
                    break
        elif isinstance(s, For):
            if s.init is not None:
                self.exec(s.init, frame)
            while s.cond is None or self.eval(s.cond, frame, s.line):
                self.exec(s.body, frame)
                if s.step is not None:
                    self.exec(s.step, frame)
                self.tick(s)
        elif isinstance(s, CallStmt):
            self.call(s.name, s.args, frame, s.line)
        elif isinstance(s, Return):
            raise _ReturnSignal(None if s.value is None else self.eval(s.value, frame, s.line))
        else:
            raise TypeError(type(s).__name__)

    def _store(self, target, v, frame, line):
        if isinstance(target, Name):
            self._write_var(frame, target.id, v, line)
        else:
            self._write_cell(frame, target.array, self.eval(target.index, frame, line), v, line)

    def call(self, name: str, args, frame: Frame, line: int):
        try:
            f = self.program.function(name)
        except KeyError:
            raise EvalError(f"unknown function {name!r}", line) from None
        if len(args) != len(f.params):
            raise EvalError(f"{name} expects {len(f.params)} arguments", line)
        callee = Frame(name)
        for p, a in zip(f.params, args):
            if p.by_ref or p.is_array:
                if not isinstance(a, Name):
                    raise EvalError(f"argument for {p.name!r} must be a variable", line)
                callee.alias[p.name] = frame.resolve(a.id)
            else:
                callee.vars[p.name] = self.eval(a, frame, line)
        return self.run_body(f, callee)

    def run_body(self, f: FunctionDecl, frame: Frame):
        try:
            self.exec(f.body, frame)
        except _ReturnSignal as r:
            return r.value
        return None


class _Missing:
    def __repr__(self):
        return "<missing>"


_MISSING = _Missing()

_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_forward(
    p: Program,
    inputs: dict,
    rng_script: Sequence[int] = (),
    func: str | None = None,
    step_budget: int = DEFAULT_STEP_BUDGET,
    width: Optional[int] = None,
) -> EvalResult:
    """Run ``func`` (default: the entry function) on concrete ``inputs``.

    Array inputs are given as lists and copied; the returned ``env`` holds the
    final value of every variable of the entry activation.
    """
    f = p.function(func)
    interp = Interpreter(p, rng_script, step_budget, width)
    frame = Frame(f.name)
    for prm in f.params:
        if prm.name not in inputs:
            raise EvalError(f"missing input {prm.name!r}")
        frame.vars[prm.name] = copy.deepcopy(inputs[prm.name])
    ret = interp.run_body(f, frame)
    return EvalResult(ret, dict(frame.vars), interp.visits, interp.accesses,
                      interp.steps, interp.rng_pos)
