import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from retrograde.constraint import Poly, read
from retrograde.minilang import Index, Num, eval_forward, parse
from retrograde.retro import (
    AffineSummary, Frontier, Unroll, analyze_backward, annotate, growth_report,
    record_and_reverse, reverse_assign, reverse_call, reverse_if, reverse_loop, reverse_swap,
)
from retrograde.retro import report as R

from conftest import load

BOX = range(-8, 9)


def _outs(pair):
    return {n: str(v) for n, v in pair.outputs}


def _stmt(src, i=0):
    return parse(src).functions[-1].body.stmts[i]


# -- single statements ---------------------------------------------------

def test_reverse_increment():
    g = reverse_assign(_stmt("void f(int e) { e = e + 1; }"), Frontier.seed({"e": "e"}, "e == 10"))
    (pair,) = g.pairs
    assert [str(c.pred) for c in pair.conds] == ["e == 9"]


def test_reverse_decrement():
    g = reverse_assign(_stmt("void f(int e) { e = e - 1; }"), Frontier.seed({"e": "e"}, "e == 5"))
    assert [str(c.pred) for c in g.pairs[0].conds] == ["e == 6"]


def test_reverse_copy():
    g = reverse_assign(_stmt("void f(int a, int b) { a = b; }"), Frontier.seed({"a": "a", "b": "b"}))
    (pair,) = g.pairs
    assert _outs(pair) == {"a": "b", "b": "b"}
    assert not pair.conds


@pytest.mark.parametrize("c", [-3, 0, 1, 7])
def test_reverse_assign_inverts_forward(c):
    s = _stmt(f"void f(int x) {{ x = x + {c}; }}")
    g = reverse_assign(s, Frontier.seed({"x": "x"}))
    out = g.pairs[0].outputs[0][1]
    for x0 in BOX:
        assert out.eval_int({"x": x0}) == x0 + c


def _cells():
    c0, c1 = Index("x", Num(0)), Index("x", Num(1))
    f = Frontier.seed({"o0": read("x", Poly.const(0)), "o1": read("x", Poly.const(1))})
    return c0, c1, f


def test_reverse_swap_exchanges_and_is_involution():
    c0, c1, f = _cells()
    g = reverse_swap(c0, c1, f)
    assert _outs(g.pairs[0]) == {"o0": "x[1]", "o1": "x[0]"}
    assert _outs(reverse_swap(c0, c1, g).pairs[0]) == _outs(f.pairs[0])


def test_reverse_swap_same_cell():
    c0, _, f = _cells()
    assert _outs(reverse_swap(c0, c0, f).pairs[0]) == _outs(f.pairs[0])


def test_reverse_if_code1(code1):
    s = code1.function().body.stmts[2]
    g = reverse_if(s, Frontier.seed({"e": "e"}))
    got = [([str(c.pred) for c in q.conds], _outs(q)) for q in g.pairs]
    assert got == [(["t != 0"], {"e": "e + 1"}), (["t == 0"], {"e": "e - 1"})]


def test_reverse_if_false_literal():
    s = _stmt("void f(int e) { if (false) e = 1; }")
    assert len(reverse_if(s, Frontier.seed({"e": "e"})).pairs) == 1


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_nested_ifs_bound(k):
    src = "int f(int a) { int e = 0; " + "".join(f"if (a > {i}) {{ e = e + {i + 1}; " for i in range(k)) \
        + "}" * k + " return e; }"
    p = parse(src)
    g = reverse_if(p.functions[0].body.stmts[1], Frontier.seed({"e": "e"}), p)
    assert len(g.pairs) <= 2 ** k


def test_reverse_loop_false_literal():
    s = _stmt("void f(int e) { while (false) e = 2; }")
    g = reverse_loop(s, Frontier.seed({"e": "e"}))
    assert len(g.pairs) == 1 and not g.truncated


def test_reverse_call_byref():
    p = load("calls.rg")
    call = p.function("twice").body.stmts[1]
    g = reverse_call(call, Frontier.seed({"c": "c", "a": "a"}), p)
    assert _outs(g.pairs[0]) == {"c": "a + c", "a": "a"}


def test_reverse_call_identity():
    p = parse("void id(int &x) { x = x; } void main(int y) { id(y); }")
    g = reverse_call(p.function("main").body.stmts[0], Frontier.seed({"y": "y"}), p)
    assert _outs(g.pairs[0]) == {"y": "y"}


# -- whole programs ------------------------------------------------------

def test_code1_histories(code1):
    a = analyze_backward(code1)
    assert not a.truncated and len(a) == 2
    h1, h2 = a.histories
    assert h1.describe_inputs() == ["a ∈ Z_a", "b ∈ Z_{5-a}"]
    assert h1.describe_outputs() == ["ret = 1"]
    assert h2.describe_inputs() == ["a ∈ Z_a", "b ∉ Z_{5-a}"]
    assert h2.describe_outputs() == ["ret = -1"]


def test_code1_out_spec(code1):
    a = analyze_backward(code1, "ret == 1")
    assert len(a) == 1 and a.histories[0].describe_inputs()[1] == "b ∈ Z_{5-a}"


def test_return_constant():
    a = analyze_backward(parse("int f() { return 7; }"))
    assert len(a) == 1 and a.histories[0].describe_outputs() == ["ret = 7"]


def test_sum_loop_closed_form():
    a = analyze_backward(load("sumloop.rg"), policy=AffineSummary())
    assert not a.truncated
    for n in range(-5, 101):
        (h,) = a.covering({"n": n})
        assert h.outputs_at({"n": n})["ret"] == (n * (n + 1) // 2 if n >= 0 else 0)


def test_unroll_truncates_long_loop():
    p = parse("int f(int n) { int i = 0; while (i < n) i = i + 1; return i; }")
    iterations = max(eval_forward(p, {"n": n}).ret for n in range(0, 6))
    assert iterations == 5
    a = analyze_backward(p, policy=Unroll(3))
    assert a.truncated and "unroll" in a.reasons


def test_deeploop_default_vs_unroll():
    p = load("deeploop.rg")
    assert not analyze_backward(p).truncated
    assert analyze_backward(p, policy=Unroll(2)).truncated


def test_loop_exit_condition_once():
    p = parse("int f(int n) { int i = 0; while (i < n) i = i + 1; return i; }")
    for h in analyze_backward(p, policy=Unroll(4)):
        assert sum(c.kind == "exit" for c in h.conds) == 1


def test_budget_truncates():
    a = analyze_backward(load("code14_literal.rg"), policy=Unroll(6), budget=20)
    assert a.truncated and "budget" in a.reasons


def test_code14_unroll4_replay():
    p = load("code14_literal.rg")
    a = analyze_backward(p, policy=Unroll(4), assume="size >= 0 && size <= 4")
    assert not a.truncated
    for n in range(0, 4):  # length 4 runs in the acceptance-sized sweep below
        for arr in itertools.product(range(-3, 4), repeat=n):
            env = {"a": list(arr), "size": n}
            want = eval_forward(p, env).ret
            assert {h.outputs_at(env)["ret"] for h in a.covering(env)} == {want}


def test_code16_analogue():
    a = analyze_backward(load("code16.rg"))
    assert [h.describe_outputs() for h in a] == [["ret = 2"], ["ret = 1"]]


def test_growth_report(code1):
    g = growth_report(analyze_backward(code1))
    (row,) = g["lines"]
    assert row["line"] == 3 and row["out"] == 2 and g["histories"] == 2


def test_growth_straight_line():
    g = growth_report(analyze_backward(parse("int f(int a) { int b = a + 1; b = b * 2; return b; }")))
    assert g["histories"] == 1 and all(r["out"] == 1 for r in g["lines"])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_growth_independent_ifs(k):
    body = " ".join(f"if (x{i} > 0) s = s + {2 ** i};" for i in range(k))
    params = ", ".join(f"int x{i}" for i in range(k))
    a = analyze_backward(parse(f"int f({params}) {{ int s = 0; {body} return s; }}"))
    assert len(a) == 2 ** k


# -- annotated listings --------------------------------------------------

def test_annotate_value_change():
    text = annotate(parse("void f(int a, int b) { int y; y = a; a = b; }"))
    assert "2↑ y{r1} = a{1};" in text and "1↑ a{0} = b;" in text


def test_annotate_if_schema():
    src = "void f(int x, int y, int a, int b, bool condition) " \
          "{ y = x; if (condition) { y = x; x = a; } x = b; }"
    lines = annotate(parse(src)).splitlines()
    assert lines == ["5↑ y{r3,r4} = x{{1,1},2};", "4↑ {", "3↑   y{r1} = x{2};",
                     "2↑   x{1} = a;", "   } (condition)", "1↑ x{0} = b;"]


def test_annotate_call_schema():
    src = "void func_name(int a, int &b) { b = a; } void main(int p, int q, int r, int s) " \
          "{ int a; int b; a = p; b = q; func_name(a, b); a = r; b = s; }"
    lines = annotate(parse(src), "main").splitlines()
    assert lines[-5:] == ["5↑ a{k} = p;", "4↑ b{k} = q;", "3↑ func_name(a{k}, b{k});",
                          "2↑ a{0} = r;", "1↑ b{0} = s;"]


def test_annotate_empty():
    assert annotate(parse("")) == ""


# -- recording -----------------------------------------------------------

def test_record_code1(code1):
    rec = record_and_reverse(code1, {"a": 1, "b": 4})
    assert rec.output == 1 and rec.restored_env == {"a": 1, "b": 4}


def test_record_shuffle_restores_array():
    x = [5, 1, 4, 2, 3]
    p = load("code7.rg")
    rec = record_and_reverse(p, {"x": list(x), "n": 5}, rng_script=[3, 1, 2, 0])
    assert rec.final_env["x"] == eval_forward(p, {"x": list(x), "n": 5}, [3, 1, 2, 0]).env["x"]
    assert rec.final_env["x"] != x
    assert rec.restored_env["x"] == x


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-50, 50), max_size=12))
def test_record_maxsum_roundtrip(a):
    rec = record_and_reverse(load("code14_literal.rg"), {"a": list(a), "size": len(a)})
    assert rec.restored_env == {"a": a, "size": len(a)}


# -- reports -------------------------------------------------------------

def test_report_json_byte_stable(code1):
    first = R.dumps(analyze_backward(code1), seed=3, source="code1.rg")
    second = R.dumps(analyze_backward(code1), seed=3, source="code1.rg")
    assert first == second
    doc = json.loads(first)
    assert doc["schema"] == R.SCHEMA_ID and doc["seed"] == 3 and len(doc["histories"]) == 2


def test_report_dot(code1):
    dot = R.to_dot(analyze_backward(code1))
    assert dot.startswith("digraph") and dot.count("shape=ellipse") == 2


# -- soundness and completeness on a box --------------------------------

def _check_box(p, out_spec="any", pred=lambda r: True):
    a = analyze_backward(p, out_spec)
    assert not a.truncated
    for x, y in itertools.product(BOX, BOX):
        env = {"a": x, "b": y}
        want = eval_forward(p, env).ret
        cov = a.covering(env)
        if pred(want):
            assert cov, env  # completeness
        for h in cov:  # soundness
            assert h.outputs_at(env)["ret"] == want
            assert pred(want)


def test_code1_sound_complete(code1):
    _check_box(code1)
    _check_box(code1, "ret == 1", lambda r: r == 1)
    _check_box(code1, "ret == -1", lambda r: r == -1)


_ATOM = st.sampled_from(["a", "b", "1", "2", "-3"])


@st.composite
def _body(draw, depth=0):
    out = []
    for _ in range(draw(st.integers(1, 3))):
        kind = draw(st.sampled_from(["set", "inc"] + (["if"] if depth < 2 else [])))
        v = draw(st.sampled_from(["a", "b", "c"]))
        if kind == "set":
            out.append(f"{v} = {draw(_ATOM)} {draw(st.sampled_from(['+', '-']))} {draw(_ATOM)};")
        elif kind == "inc":
            out.append(f"{v} += {draw(_ATOM)};")
        else:
            cond = f"{draw(_ATOM)} {draw(st.sampled_from(['<', '==', '!=', '>=']))} {draw(_ATOM)}"
            out.append(f"if ({cond}) {{ {draw(_body(depth + 1))} }} else {{ {draw(_body(depth + 1))} }}")
    return " ".join(out)


@settings(max_examples=40, deadline=None)
@given(_body(), st.sampled_from(["any", "ret == 0", "ret > 2"]))
def test_random_programs_sound_complete(body, spec):
    p = parse(f"int f(int a, int b) {{ int c = 0; {body} return a + b + c; }}")
    check = {"any": lambda r: True, "ret == 0": lambda r: r == 0, "ret > 2": lambda r: r > 2}[spec]
    _check_box(p, spec, check)
