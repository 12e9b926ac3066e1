"""Symbolic integer sets, predicates and the small solvers behind them."""
from .sets import (
    AllIntegers, Complement, Finite, Intersection, Interval, LinearRelation,
    SetExpr, Shift, Union, dumps, enumerate_set, free_vars, from_json, in_range,
    is_empty, member, normalize, overflow_variants, to_dnf, to_json, to_text,
)
from .solve import (
    EMPTY, NONEMPTY, UNKNOWN, check, check_dnf, div2_split, expand_div2,
    find_witness, halving_distance_system, project_interval, refute,
    solve_center_equation, solve_distance_system,
)
from .symbolic import (
    Ite, Op, Poly, Pred, Read, Truth, Unbound, Var, format_poly, make_ite,
    make_op, read, truth,
)

enumerate = enumerate_set  # noqa: A001  (operation name used in reports)
