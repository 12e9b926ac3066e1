"""The subject mini-language: parsing, printing, desugaring, forward evaluation."""
from .ast import *  # noqa: F401,F403
from .ast import __all__ as _ast_all
from .desugar import desugar, is_desugared
from .interp import (
    BudgetExceeded, EvalError, EvalResult, Frame, Interpreter, OutOfBounds,
    c_div, c_mod, eval_forward, wrap,
)
from .parser import ParseError, UnsupportedConstruct, parse, tokenize
from .printer import format_expr, format_function, format_program, format_stmt

__all__ = list(_ast_all) + [
    "desugar", "is_desugared", "BudgetExceeded", "EvalError", "EvalResult",
    "Frame", "Interpreter", "OutOfBounds", "c_div", "c_mod", "eval_forward",
    "wrap", "ParseError", "UnsupportedConstruct", "parse", "tokenize",
    "format_expr", "format_function", "format_program", "format_stmt",
]
