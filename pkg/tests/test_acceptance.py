"""Exit criteria. Each test prints one ``criterion N: PASS|FAIL`` line with its runtime.

Run with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import itertools
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from retrograde import sortnet as S  # noqa: E402
from retrograde.casebook import binsearch as B  # noqa: E402
from retrograde.casebook import invperm as IP  # noqa: E402
from retrograde.casebook import maxsum as MS  # noqa: E402
from retrograde.casebook import searchsim as SS  # noqa: E402
from retrograde.casebook import shuffle as SH  # noqa: E402
from retrograde.constraint import Poly, member, solve_center_equation  # noqa: E402
from retrograde.minilang import eval_forward  # noqa: E402
from retrograde.retro import AffineSummary, analyze_backward, record_and_reverse  # noqa: E402

from conftest import load  # noqa: E402

pytestmark = pytest.mark.acceptance
RESULTS = []  # printed by the terminal summary hook in conftest.py


@contextmanager
def criterion(number: int, title: str, limit: float):
    """Time the body; print one PASS/FAIL line; fail on error or overtime."""
    t0 = time.perf_counter()
    err = None
    try:
        yield
    except AssertionError as e:
        err = e
    dt = time.perf_counter() - t0
    ok = err is None and dt < limit
    RESULTS.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  "
                   f"({dt:.2f} s, limit {limit:g} s)")
    if err is not None:
        raise err
    assert dt < limit, f"criterion {number} took {dt:.2f} s (limit {limit} s)"


def test_criterion_1_code1():
    with criterion(1, "Code 1 histories, sound and complete on [-8,8]^2", 1.0):
        p = load("code1.rg")
        a = analyze_backward(p)
        assert not a.truncated and len(a) == 2
        h1, h2 = a.histories
        assert h1.describe_inputs() == ["a ∈ Z_a", "b ∈ Z_{5-a}"]
        assert h1.describe_outputs() == ["ret = 1"]
        assert h2.describe_inputs() == ["a ∈ Z_a", "b ∉ Z_{5-a}"]
        assert h2.describe_outputs() == ["ret = -1"]
        for x, y in itertools.product(range(-8, 9), repeat=2):
            env = {"a": x, "b": y}
            want = eval_forward(p, env).ret
            inside = [h for h in a if member(h.inputs["b"], y, env)]
            assert len(inside) == 1  # the two characterizations partition the box
            assert inside[0].outputs_at(env) == {"ret": want}
            assert a.covering(env) == inside


def test_criterion_2_sum_loop():
    with criterion(2, "sum-loop closed form, replay n in [-5,100]", 1.0):
        p = load("sumloop.rg")
        a = analyze_backward(p, policy=AffineSummary())
        assert not a.truncated
        n = Poly.var("n")
        forms = {str(h.residual or h.inputs["n"]): h.outputs["ret"] for h in a}
        assert sorted(map(str, forms.values())) == sorted(
            [str(Poly.const(0)), str((n * n + n) * Fraction(1, 2))])
        for v in range(-5, 101):
            (h,) = a.covering({"n": v})
            got = h.outputs_at({"n": v})["ret"]
            assert got == eval_forward(p, {"n": v}).ret
            assert got == (0 if v < 0 else v * (v + 1) // 2)


def test_criterion_3_sorting_networks():
    with criterion(3, "sorting networks: Figure 6, base sizes, identity, corpus agreement", 10.0):
        assert S.retro_predecessors(S.NET3, "011").predecessors == {(0, 1, 1), (1, 0, 1), (1, 1, 0)}
        base = S.verify_retrograde_base(S.NET3)
        assert base.passed and base.sizes == [1, 3, 3, 1]
        covered = set().union(*(r.predecessors for r in base.results))
        assert covered == set(itertools.product((0, 1), repeat=3))
        single = S.verify_single_test(S.NET4)
        assert S.NET4.m == 5 and single.passed and single.count == 24
        d = single.result.d_profile  # d_1..d_m, d_1 at the last comparator
        m = S.NET4.m
        assert sum(2 ** k * d[m - k - 1] for k in range(m)) == 2 ** 5 - 24 == 8
        assert single.identity_lhs == single.identity_rhs == 8
        sizes = single.result.sizes
        assert all(sizes[k] == 2 * sizes[k - 1] - d[k - 1] for k in range(1, m + 1))
        good = S.correct_corpus()
        bad = S.mutant_corpus(50, seed=0)
        assert len(good) >= 20 and len(bad) >= 50
        for net in good.values():
            e = S.equivalence_check(net)
            assert e.forward and e.zero_one and e.single
        for net in bad:
            e = S.equivalence_check(net)
            assert e.agree and not e.forward


def test_criterion_4_binary_search():
    with criterion(4, "binary search: distance graph, center equation, states, hazards", 30.0):
        assert set(B.successors(1)) == {2, 3} and set(B.successors(2)) == {3, 4, 5}
        g = B.binsearch_graph(1000)
        assert all(g.reachable(s) for s in range(3, 1001))
        for p in range(0, 257):
            want = {q for q in range(0, 257) if (p + q) // 2 == p}
            assert set(solve_center_equation(p)) & set(range(257)) == want
            assert solve_center_equation(p) == [p, p + 1]
        census = B.sorted_state_census(max_n=6, values=range(10))
        assert census[2] == 0 and census[3] == 0 and census[1] > 0 and census[4] > 0
        w = B.unsorted_witness()
        assert list(w.x) != sorted(w.x) and w.state == 1
        for size in (0, -1):
            assert B.binsearch_probe([7], 7, size=size).oob


def test_criterion_5_shuffle():
    with criterion(5, "shuffle: Tables 1, 2, 4; uniform enumeration; doubly stochastic", 20.0):
        third = Fraction(1, 3)
        assert SH.shuffle_matrix(3, 0).rows == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        assert SH.shuffle_matrix(3, 1).rows == [[2 * third, 0, third], [0, 2 * third, third],
                                                [third, third, third]]
        assert SH.shuffle_matrix(3, 2).rows == [[third] * 3] * 3
        for direction in SH.DIRECTIONS:
            for n in range(1, 7):
                counts = SH.shuffle_enumerate(n, direction)
                assert set(counts) == set(itertools.permutations(range(n)))
                assert set(counts.values()) == {1}
                mats = SH.shuffle_steps(n, direction)
                assert all(m.doubly_stochastic() for m in mats)
                for k, m in enumerate(mats):
                    assert m == SH.enumerated_matrix(n, k, direction)


def test_criterion_6_inverse_permutation():
    with criterion(6, "inverse permutation: n <= 8 exhaustive, 100 x n=10^6", 30.0):
        for n in range(0, 9):
            for perm in itertools.permutations(range(1, n + 1)):
                x = IP.one_indexed(perm)
                a = IP.invert_permutation(x, "negate", check=False)
                b = IP.invert_permutation(x, "xor", check=False)
                assert np.array_equal(a.result, IP.naive_inverse(x))
                assert np.array_equal(a.result, b.result.astype(np.int64))
                assert a.touches <= 2 * n and b.touches <= 2 * n
        rng = np.random.default_rng(0)
        n = 10 ** 6
        for _ in range(100):
            x = IP.random_permutation(n, rng)
            a = IP.invert_permutation(x, "negate")
            b = IP.invert_permutation(x, "xor", check=False)
            assert np.array_equal(a.result, IP.naive_inverse(x))
            assert np.array_equal(a.result, b.result.astype(np.int64))
            assert a.touches <= 2 * n and b.touches <= 2 * n


def _brute_2d(m):
    A = np.asarray(m)
    R, C = A.shape
    return max(int(A[r0:r1 + 1, c0:c1 + 1].sum()) for r0 in range(R) for r1 in range(r0, R)
               for c0 in range(C) for c1 in range(c0, C))


def test_criterion_7_maxsum():
    with criterion(7, "maxsum: example, 10^4 random arrays, splits, Figure 28", 20.0):
        ex = MS.maxsum_analyze([1, -2, 3, 4, 5, -7, -12, 3, 8])
        assert ex.value == 12 and ex.range == (2, 4)
        rng = np.random.default_rng(0)
        for _ in range(10 ** 4):
            a = rng.integers(-100, 101, size=int(rng.integers(0, 201))).tolist()
            r = MS.maxsum_analyze(a)
            assert r.scan_value == r.candidate_value == r.oracle_value == MS.code14(a)
            assert not r.split_inside()
        d = MS.maxsum_2d_demo(MS.FIG28)
        assert d.box == (0, 0, 3, 3) and d.value == 53 == _brute_2d(MS.FIG28)


def test_criterion_8_search_simulator():
    with criterion(8, "search simulator: 5 levels, 10^3 random single-match decodes", 10.0):
        assert SS.search_sim(list(range(15)), 4).levels == 5
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(1, 10 ** 4 + 1))
            values, t, _ = SS.random_single_match(n, rng)
            linear = [i for i, v in enumerate(values) if v == t]
            tr = SS.search_sim(values, t)
            assert tr.decoded == linear and len(linear) == 1
            assert tr.steps <= 2 * int(np.ceil(np.sqrt(2 * n))) + tr.levels


def _inputs(name, rng):
    n = int(rng.integers(0, 12))
    arr = rng.integers(-50, 51, size=n).tolist()
    if name == "code1.rg":
        return {"a": int(rng.integers(-8, 9)), "b": int(rng.integers(-8, 9))}, []
    if name == "code4.rg":
        n = max(n, 1)
        return {"x": sorted(rng.integers(0, 20, size=n).tolist()), "size": n,
                "t": int(rng.integers(0, 20))}, []
    if name in ("code7.rg", "code8.rg"):
        return {"x": arr, "n": n}, rng.integers(0, 1000, size=max(n - 1, 0)).tolist()
    if name == "code13.rg":
        return {"x": [0] + (rng.permutation(n) + 1).tolist(), "size": n}, []
    if name == "code14.rg":
        return {"a": arr, "n": n}, []
    return {"a": arr, "size": n}, []


def test_criterion_9_recording():
    names = ["code1.rg", "code4.rg", "code7.rg", "code8.rg", "code13.rg", "code14.rg",
             "code14_literal.rg"]
    with criterion(9, "record_and_reverse restores inputs on Codes 1, 4, 7, 8, 13, 14", 10.0):
        rng = np.random.default_rng(0)
        for name in names:
            p = load(name)
            changed = 0
            for _ in range(100):
                env, script = _inputs(name, rng)
                rec = record_and_reverse(p, {k: (list(v) if isinstance(v, list) else v)
                                             for k, v in env.items()}, script)
                assert rec.restored_env == env, name
                assert rec.output == eval_forward(p, env, script).ret
                changed += rec.final_env != env
            assert changed > 0, name  # every program actually wrote something


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
