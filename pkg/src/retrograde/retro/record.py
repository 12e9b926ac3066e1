"""Recording mode: run forward while saving every overwritten value, then
unwind the saved values so the machine returns to its initial state.

The unwinding is an explicit stack rather than host recursion so long runs
do not hit the interpreter's recursion limit; each popped entry is one
backward step of the concrete trace.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..minilang.ast import Program
from ..minilang.interp import (
    DEFAULT_STEP_BUDGET, EvalError, Frame, Interpreter, _MISSING,
)


@dataclass(frozen=True)
class BackStep:
    line: int
    frame: str
    name: str
    index: Optional[int]
    undone: object  # value present before the undo
    restored: object  # value put back (None when the variable is removed)


@dataclass
class Recording:
    output: Optional[int]
    final_env: dict
    restored_env: dict
    trace: list = field(default_factory=list)
    steps: int = 0

    @property
    def depth(self) -> int:
        return len(self.trace)


def record_and_reverse(p: Program, inputs: dict, rng_script: Sequence[int] = (),
                       func: str | None = None, step_budget: int = DEFAULT_STEP_BUDGET,
                       width: Optional[int] = None) -> Recording:
    """Forward run with a write log, followed by a full undo of that log."""
    f = p.function(func)
    stack: list = []

    def on_write(line, frame, name, idx, old):
        stack.append((line, frame, name, idx, old))

    interp = Interpreter(p, rng_script, step_budget, width, on_write=on_write)
    top = Frame(f.name)
    for prm in f.params:
        if prm.name not in inputs:
            raise EvalError(f"missing input {prm.name!r}")
        top.vars[prm.name] = copy.deepcopy(inputs[prm.name])
    output = interp.run_body(f, top)
    final_env = copy.deepcopy(top.vars)

    trace = []
    while stack:
        line, frame, name, idx, old = stack.pop()
        if idx is None:
            undone = frame.vars.get(name)
            if old is _MISSING:
                del frame.vars[name]
                restored = None
            else:
                frame.vars[name] = old
                restored = old
        else:
            arr = frame.vars[name]
            undone = arr[idx]
            arr[idx] = old
            restored = old
        if isinstance(undone, list):
            undone = list(undone)
        trace.append(BackStep(line, frame.func, name, idx, undone, restored))
    return Recording(output, final_env, dict(top.vars), trace, interp.steps)


__all__ = ["BackStep", "Recording", "record_and_reverse"]
