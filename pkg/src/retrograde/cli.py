"""Command line: ``analyze``, ``annotate``, ``record``, ``net`` and ``case``.

Exit codes: 0 success, 1 verification failed, 2 usage or input error,
3 analysis truncated.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from . import sortnet as SN
from .casebook import binsearch, invperm, maxsum, searchsim, shuffle
from .minilang.interp import EvalError
from .minilang.parser import ParseError, parse
from .retro import analyze_backward, annotate, record_and_reverse
from .retro.engine import AnalysisError, DEFAULT_BUDGET, LoopPolicy, Unroll, AffineSummary
from .retro import report as R

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNCATED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _budget(value) -> int:
    if value is not None:
        b = value
    elif os.environ.get("RG_BUDGET"):
        try:
            b = int(os.environ["RG_BUDGET"])
        except ValueError:
            raise UsageError("RG_BUDGET must be an integer") from None
    else:
        b = DEFAULT_BUDGET
    if b <= 0:
        raise UsageError("budgets must be positive")
    return b


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False,
                      default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(type(o).__name__)


# -- analyze / annotate / record -----------------------------------------

def cmd_analyze(args, out) -> int:
    source = _read(args.file)
    p = parse(source)
    if args.unroll is not None and args.affine:
        policy = AffineSummary(args.unroll)
    elif args.unroll is not None:
        policy = Unroll(args.unroll)
    elif args.affine:
        policy = AffineSummary()
    else:
        policy = LoopPolicy()
    a = analyze_backward(p, args.out, policy=policy, budget=_budget(args.budget),
                         func=args.func, assume=args.assume)
    name = os.path.basename(args.file)
    if args.format == "json":
        out.write(R.dumps(a, args.seed, name))
    elif args.format == "dot":
        out.write(R.to_dot(a))
    else:
        out.write(R.to_text(a, args.seed, frames=not args.no_frames))
    return EXIT_TRUNCATED if a.truncated else EXIT_OK


def cmd_annotate(args, out) -> int:
    text = annotate(parse(_read(args.file)), args.func)
    out.write(text + ("\n" if text else ""))
    return EXIT_OK


def _parse_inputs(items) -> dict:
    env = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"input {item!r} is not name=value")
        k, v = item.split("=", 1)
        try:
            env[k.strip()] = [int(x) for x in v.split(",")] if "," in v or v.startswith("[") \
                else int(v)
        except ValueError:
            try:
                env[k.strip()] = json.loads(v)
            except json.JSONDecodeError:
                raise UsageError(f"bad value for {k}: {v!r}") from None
    return env


def cmd_record(args, out) -> int:
    p = parse(_read(args.file))
    env = _parse_inputs(args.input)
    script = [int(x) for x in args.rng.split(",")] if args.rng else []
    rec = record_and_reverse(p, env, script, args.func, width=args.width)
    body = {
        "tool": "retrograde", "version": __version__, "seed": args.seed,
        "source": os.path.basename(args.file), "output": rec.output,
        "final": rec.final_env, "restored": rec.restored_env,
        "restored_equals_input": rec.restored_env == env, "steps": rec.steps,
        "trace": [{"line": s.line, "frame": s.frame, "name": s.name, "index": s.index,
                   "undone": s.undone, "restored": s.restored} for s in rec.trace],
    }
    if args.format == "json":
        out.write(_dump(body))
    else:
        out.write(f"# retrograde {__version__} seed={args.seed} record {body['source']}\n")
        out.write(f"output: {rec.output}\nfinal: {rec.final_env}\nrestored: {rec.restored_env}\n")
        for s in rec.trace:
            cell = s.name if s.index is None else f"{s.name}[{s.index}]"
            out.write(f"  {s.line:>4}  {cell}: {s.undone} -> {s.restored}\n")
    return EXIT_OK if rec.restored_env == env else EXIT_FAIL


# -- net --------------------------------------------------------------

NET_MODES = ("zero-one", "base", "single", "equiv", "clash", "stats", "forward")


def _state(s) -> str:
    return SN.fmt_state(s)


def cmd_net(args, out) -> int:
    try:
        net = SN.parse_network(_read(args.file))
    except SN.NetworkError as e:
        raise UsageError(f"{args.file}: {e}") from None
    mode = args.mode
    body = {"tool": "retrograde", "version": __version__, "seed": args.seed,
            "source": os.path.basename(args.file), "mode": mode,
            "wires": net.wires, "comparators": net.m}
    csv = None
    dot = SN.network_dot(net)
    if mode == "forward":
        r = SN.verify_forward(net)
        passed = r.passed
        body["witnesses"] = [[_state(i), _state(o)] for i, o in r.witnesses]
    elif mode == "zero-one":
        r = SN.verify_zero_one(net)
        passed = r.passed
        body["cases"] = r.cases
        body["witnesses"] = [[_state(i), _state(o)] for i, o in r.witnesses]
    elif mode == "base":
        r = SN.verify_retrograde_base(net)
        passed = r.passed
        body.update(sizes=r.sizes, expected=r.expected, missing=[_state(x) for x in r.missing])
    elif mode == "single":
        r = SN.verify_single_test(net)
        passed = r.passed
        body.update(count=r.count, expected=r.expected, d=r.result.d_profile,
                    identity={"lhs": r.identity_lhs, "rhs": r.identity_rhs,
                              "holds": r.identity_holds,
                              "text": f"2^{net.m} - {r.count} = {r.identity_lhs}; "
                                      f"sum 2^k d = {r.identity_rhs}"},
                    unreachable=[list(x) for x in r.missing],
                    stages=[{"k": s.k, "comparator": s.index, "before": s.before,
                             "destroyed": s.destroyed, "copied": s.copied, "split": s.split,
                             "impossible": s.impossible, "repeated": s.repeated, "d": s.d,
                             "after": s.after} for s in r.result.stages])
        csv = SN.d_profile_csv(r.result)
    elif mode == "equiv":
        r = SN.equivalence_check(net)
        passed = r.passed
        body.update(forward=r.forward, zero_one=r.zero_one, single=r.single, agree=r.agree)
    elif mode == "clash":
        d = SN.clash_analysis(net)
        passed = not d.clashes
        body.update(connected=d.connected, reach=d.reach,
                    clashes=[{"input": _state(c.input), "output": _state(c.output),
                              "kind": c.kind, "inactive": list(c.inactive),
                              "paths": [list(p) for p in c.paths]} for c in d.clashes])
        dot = SN.path_dot(d)
    else:
        body.update(SN.stats(net))
        passed = SN.verify_retrograde_base(net).passed
        if "single" in body:
            csv = SN.d_profile_csv(SN.verify_single_test(net).result)
    body["passed"] = passed
    if args.format == "json":
        out.write(_dump(body))
    elif args.format == "dot":
        out.write(dot)
    elif args.format == "csv":
        if csv is None:
            raise UsageError(f"mode {mode} has no CSV output")
        out.write(csv)
    else:
        out.write(f"# retrograde {__version__} seed={args.seed} net {body['source']} {mode}\n")
        for k, v in body.items():
            if k not in ("tool", "version", "seed", "source", "mode", "stages", "reach"):
                out.write(f"{k}: {v}\n")
    return EXIT_OK if passed else EXIT_FAIL


# -- case -------------------------------------------------------------

def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"not a comma-separated integer list: {text!r}") from None


def cmd_case(args, out) -> int:
    name = args.name
    if name == "binsearch":
        body = binsearch.report(args.max_size)
        if args.array is not None:
            p = binsearch.binsearch_probe(_ints(args.array), args.t, args.size)
            body["probe"] = {"x": list(p.x), "t": p.t, "size": p.size, "result": p.result,
                             "state": p.state, "state_text": binsearch.STATE_TEXT[p.state],
                             "oob": p.oob, "loop_entered": p.loop_entered}
        dot = binsearch.fixed_subgraph_dot(args.graph_size)
    elif name == "shuffle":
        if args.n < 1 or not 0 <= (args.steps if args.steps is not None else 0) <= args.n - 1:
            raise UsageError("need n >= 1 and 0 <= steps <= n-1")
        body = shuffle.report(args.n, args.steps, args.direction)
        dot = None
        if args.format == "csv":
            steps = args.n - 1 if args.steps is None else args.steps
            out.write(shuffle.shuffle_matrix(args.n, steps, args.direction).to_csv())
            return EXIT_OK if body["passed"] else EXIT_FAIL
    elif name == "invperm":
        if args.perm is not None:
            x = invperm.one_indexed(_ints(args.perm))
            try:
                r = invperm.invert_permutation(x, args.variant)
            except invperm.NotAPermutation as e:
                raise UsageError(str(e)) from None
            ok = bool((r.result == invperm.naive_inverse(x)).all()) and r.touches <= 2 * r.n
            body = {"case": "invperm", "x": x[1:].tolist(), "inverse": r.result[1:].tolist(),
                    "touches": r.touches, "variant": args.variant, "passed": ok,
                    "checks": {"matches_naive": ok}}
        else:
            body = invperm.report(args.n, args.seed, args.trials)
        dot = None
    elif name == "maxsum":
        arr = _ints(args.array) if args.array is not None else [1, -2, 3, 4, 5, -7, -12, 3, 8]
        body = maxsum.report(arr, args.trials, args.seed)
        if args.fig28:
            d = maxsum.maxsum_2d_demo(maxsum.FIG28)
            body["fig28"] = {"value": d.value, "box": list(d.box),
                             "negative_l": None if d.negative_l is None
                             else {"cells": [list(c) for c in d.negative_l[0]],
                                   "sum": d.negative_l[1]}}
            body["checks"]["fig28_whole"] = d.box == (0, 0, 3, 3) and d.value == 53
            body["passed"] = all(body["checks"].values())
        dot = None
    elif name == "searchsim":
        body = searchsim.report(args.n, args.seed, args.trials, strict=args.strict)
        if args.probe:
            body["decoder"] = searchsim.decoder_table(body["levels"])
        dot = None
    else:
        raise UsageError(f"unknown case {name}")
    body.update(tool="retrograde", version=__version__, seed=args.seed)
    if args.format == "json":
        out.write(_dump(body))
    elif args.format == "dot":
        if dot is None:
            raise UsageError(f"case {name} has no DOT output")
        out.write(dot)
    elif args.format == "csv":
        raise UsageError(f"case {name} has no CSV output")
    else:
        out.write(f"# retrograde {__version__} seed={args.seed} case {name}\n")
        for k, v in body.items():
            if k not in ("tool", "version", "seed", "decoder", "fixed_subgraph_12"):
                out.write(f"{k}: {v}\n")
    return EXIT_OK if body["passed"] else EXIT_FAIL


# -- parser -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="retrograde", description="Backward program analysis.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, formats):
        p.add_argument("--format", choices=formats, default="text")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized corpora")
        p.add_argument("-o", "--output", help="write to this file instead of stdout")

    a = sub.add_parser("analyze", help="enumerate input histories for an output spec")
    a.add_argument("file")
    a.add_argument("--out", default="any", help='output spec, e.g. "ret==1" or any')
    a.add_argument("--func")
    a.add_argument("--unroll", type=_positive, help="unroll loops up to K iterations")
    a.add_argument("--affine", action="store_true", help="try closed-form loop summaries")
    a.add_argument("--budget", type=_positive, help="frontier pair budget (or RG_BUDGET)")
    a.add_argument("--assume", help="entry assumption, e.g. \"n >= 0\"")
    a.add_argument("--no-frames", action="store_true")
    common(a, ("text", "json", "dot"))
    a.set_defaults(run=cmd_analyze)

    n = sub.add_parser("annotate", help="backward listing with version tags")
    n.add_argument("file")
    n.add_argument("--func")
    common(n, ("text",))
    n.set_defaults(run=cmd_annotate)

    r = sub.add_parser("record", help="run forward with a write log, then undo it")
    r.add_argument("file")
    r.add_argument("--input", action="append", help="name=value or name=1,2,3")
    r.add_argument("--rng", help="comma-separated rand() outcomes")
    r.add_argument("--func")
    r.add_argument("--width", type=_positive, help="wrap arithmetic to this many bits")
    common(r, ("text", "json"))
    r.set_defaults(run=cmd_record)

    t = sub.add_parser("net", help="verify a comparator network")
    t.add_argument("file")
    t.add_argument("mode", choices=NET_MODES)
    common(t, ("text", "json", "dot", "csv"))
    t.set_defaults(run=cmd_net)

    c = sub.add_parser("case", help="run a casebook analysis")
    c.add_argument("name", choices=("binsearch", "shuffle", "invperm", "maxsum", "searchsim"))
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--steps", type=int)
    c.add_argument("--direction", choices=shuffle.DIRECTIONS, default="down")
    c.add_argument("--array", help="comma-separated integers")
    c.add_argument("--t", type=int, default=0)
    c.add_argument("--size", type=int)
    c.add_argument("--max-size", type=int, default=1000)
    c.add_argument("--graph-size", type=int, default=12)
    c.add_argument("--perm", help="1-based permutation, comma-separated")
    c.add_argument("--variant", choices=invperm.VARIANTS, default="negate")
    c.add_argument("--trials", type=int, default=0)
    c.add_argument("--fig28", action="store_true")
    c.add_argument("--probe", action="store_true", help="include the decoder table")
    c.add_argument("--strict", action="store_true", help="edge nodes only propagate")
    common(c, ("text", "json", "dot", "csv"))
    c.set_defaults(run=cmd_case)
    return ap


_CASE_N = {"shuffle": 3, "invperm": 10, "searchsim": 15}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "case":
        if args.n is None:
            args.n = _CASE_N.get(args.name, 0)
        if args.name == "searchsim" and args.n < 1:
            ap.error("--n must be positive")
        if args.name == "invperm" and args.trials == 0 and args.perm is None:
            args.trials = 20
        if args.name == "binsearch" and args.max_size < 3:
            ap.error("--max-size must be at least 3")
    target = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        return args.run(args, target)
    except (UsageError, ParseError, AnalysisError, SN.BudgetError, EvalError,
            ValueError) as e:
        print(f"retrograde: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if target is not sys.stdout:
            target.close()


if __name__ == "__main__":
    sys.exit(main())
