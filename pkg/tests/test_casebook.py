import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from retrograde.casebook import binsearch as B
from retrograde.casebook import invperm as IP
from retrograde.casebook import maxsum as MS
from retrograde.casebook import searchsim as SS
from retrograde.casebook import shuffle as SH

# -- binary search -------------------------------------------------------


def test_successors_quoted():
    assert B.successors(1) == {2: B.EITHER, 3: B.U_MOVED}
    assert B.successors(2) == {3: B.L_MOVED, 4: B.EITHER, 5: B.U_MOVED}


@pytest.mark.parametrize("d", range(1, 200))
def test_successor_sets(d):
    want = {2 * d - 1, 2 * d, 2 * d + 1} - {1}
    assert set(B.successors(d)) == want
    # every backward edge is undone by one forward pass with the same move
    for nxt, label in B.successors(d).items():
        moves = B.forward_step(nxt)[d]
        assert moves == ({B.L_MOVED, B.U_MOVED} if label == B.EITHER else {label})


def test_graph_reaches_every_size():
    g = B.binsearch_graph(1000)
    assert set(g.nodes) >= set(range(1, 1000))
    for size in range(3, 1001):
        assert g.reachable(size)
        assert g.path_length(size) <= math.ceil(math.log2(size)) + 1


def test_fixed_subgraph_size12():
    sub = B.fixed_subgraph(12)
    assert set(sub) == {1, 2, 3, 5, 6, 11}
    assert "digraph" in B.fixed_subgraph_dot(12)


def test_center_solutions():
    assert B.center_solutions(4) == [4, 5]
    assert B.center_brute(64) == {0, 1}


def test_probe_examples():
    p = B.binsearch_probe([1, 3, 5, 7], 5)
    assert p.result == 2 and p.state == 1
    q = B.binsearch_probe([1, 3, 5, 7], 4)
    assert q.result == -1 and q.state == 4


def test_sorted_census_small():
    census = B.sorted_state_census(max_n=4, values=range(6))
    assert census[2] == census[3] == 0 and census[1] and census[4]


def test_unsorted_witness():
    w = B.unsorted_witness()
    assert list(w.x) != sorted(w.x)
    assert w.state == 1 and B.binsearch_probe(w.x, w.t).state == 1


def test_boundaries():
    rows = {r["size"]: r for r in B.report()["boundaries"]}
    assert set(rows[2]["returns"]) == {"-1", "0", "1"}
    assert set(rows[1]["returns"]) == {"-1", "0"}
    assert rows[0]["oob"] and rows[-1]["oob"]
    probe = B.binsearch_probe([4], 4, size=0)
    assert probe.oob and probe.oob[0] < 0


# -- shuffle -------------------------------------------------------------


def test_tables():
    assert SH.shuffle_matrix(3, 0).rows == SH.TABLE1
    assert SH.shuffle_matrix(3, 1).rows == SH.TABLE2
    assert SH.shuffle_matrix(3, 2).uniform()


@pytest.mark.parametrize("direction", SH.DIRECTIONS)
@pytest.mark.parametrize("n", range(1, 8))
def test_matrices_doubly_stochastic_and_uniform(n, direction):
    mats = SH.shuffle_steps(n, direction)
    assert all(m.doubly_stochastic() for m in mats)
    assert all(v == Fraction(1, n) for row in mats[-1].rows for v in row)


@pytest.mark.parametrize("direction", SH.DIRECTIONS)
@pytest.mark.parametrize("n", range(1, 6))
def test_matrix_matches_enumeration(n, direction):
    for k in range(n):
        assert SH.shuffle_matrix(n, k, direction) == SH.enumerated_matrix(n, k, direction)


def test_enumerate_counts():
    c = SH.shuffle_enumerate(3, "down")
    assert len(c) == 6 and set(c.values()) == {1}
    assert SH.shuffle_enumerate(1) == {(0,): 1}
    c = SH.shuffle_enumerate(4, "up")
    assert len(c) == 24 and set(c.values()) == {1}
    with pytest.raises(ValueError):
        SH.shuffle_enumerate(9)


def test_inverse_script():
    for s in SH.scripts(4, "down"):
        assert SH.inverse_script(4, "down", s) == (0, 1, 2, 3)


# -- inverse permutation -------------------------------------------------


def test_invert_examples():
    ident = IP.one_indexed([1, 2, 3, 4])
    assert IP.invert_permutation(ident).result.tolist() == ident.tolist()
    assert IP.invert_permutation(IP.one_indexed([2, 3, 1])).result[1:].tolist() == [3, 1, 2]


def test_invert_exhaustive_small():
    for n in range(0, 7):
        for perm in itertools.permutations(range(1, n + 1)):
            x = IP.one_indexed(perm)
            a = IP.invert_permutation(x, "negate")
            b = IP.invert_permutation(x, "xor")
            assert np.array_equal(a.result, IP.naive_inverse(x))
            assert np.array_equal(a.result, b.result.astype(np.int64))
            assert a.touches <= 2 * n


@pytest.mark.parametrize("bad", [[1, 1, 2], [0, 1, 2], [1, 2, 4]])
def test_not_a_permutation(bad):
    with pytest.raises(IP.NotAPermutation):
        IP.invert_permutation(IP.one_indexed(bad))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 300).flatmap(lambda n: st.permutations(range(1, n + 1))))
def test_invert_twice_is_identity(perm):
    x = IP.one_indexed(perm)
    once = IP.invert_permutation(x)
    assert np.array_equal(IP.invert_permutation(once.result).result, x)
    assert once.touches <= 2 * len(perm)
    assert np.array_equal(once.result, IP.invert_permutation(x, "xor").result.astype(np.int64))


def test_invert_large():
    rng = np.random.default_rng(1)
    x = IP.random_permutation(200_000, rng)
    r = IP.invert_permutation(x)
    assert np.array_equal(r.result, IP.naive_inverse(x)) and r.touches <= 2 * r.n


# -- maxsum --------------------------------------------------------------

EXAMPLE = [1, -2, 3, 4, 5, -7, -12, 3, 8]


def test_maxsum_example():
    r = MS.maxsum_analyze(EXAMPLE)
    assert r.value == 12 and r.range == (2, 4)
    assert r.forward_splits == [1, 6]
    assert r.agree and not r.split_inside()


def test_maxsum_all_negative():
    r = MS.maxsum_analyze([-3, -1, -7])
    assert r.value == 0 and r.range is None and r.agree


@settings(max_examples=400, deadline=None)
@given(st.lists(st.integers(-100, 100), max_size=60))
def test_maxsum_methods_agree(a):
    r = MS.maxsum_analyze(a)
    assert r.agree and MS.code14(a) == r.value
    assert not r.split_inside()
    assert len(r.candidates) <= len(r.backward_splits) + 1
    if r.range is not None:
        i, j = r.range
        assert sum(a[i:j + 1]) == r.value


def test_fig28():
    d = MS.maxsum_2d_demo(MS.FIG28)
    assert d.value == 53 == int(np.sum(MS.FIG28)) and d.box == (0, 0, 3, 3)
    assert d.negative_l[1] < 0 and d.negative_box[1] < 0


def test_2d_trivial():
    assert MS.maxsum_2d_demo([[5]]).value == 5


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=8))
def test_2d_single_row_matches_1d(a):
    assert max(MS.maxsum_2d_demo([a]).value, 0) == MS.code14(a)


# -- search simulator ----------------------------------------------------


def test_levels():
    assert SS.levels_for(15) == 5
    assert SS.search_sim(list(range(15)), 3).levels == 5
    assert [SS.levels_for(n) for n in (1, 2, 3, 4, 6, 7)] == [1, 2, 2, 3, 3, 4]


def test_absent_target():
    t = SS.search_sim(list(range(15)), 99)
    assert not any(any(row) for row in t.marks) and t.decoded == []


def test_every_position_decodes():
    for n in (1, 5, 15, 16, 100):
        for pos in range(n):
            vals = [0] * n
            vals[pos] = 1
            t = SS.search_sim(vals, 1)
            assert t.decoded == [pos] and not t.ambiguous
            assert t.steps <= t.step_bound


def test_strict_mode_misses_edges():
    vals = [0] * 15
    vals[1] = 1  # first node of level 2
    assert SS.search_sim(vals, 1, strict=True).missed == [1]
    assert SS.search_sim(vals, 1).missed == []


def test_multiple_matches_flagged():
    t = SS.search_sim([1, 2, 3, 1, 5, 6], 1)
    assert t.ambiguous


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=60))
def test_marks_are_union_of_cones(vals):
    t = SS.search_sim(vals, 0)
    apexes = [SS.coords(p) for p in t.matches]
    want = SS.cone_marks(t.levels, apexes)
    assert [row.tolist() for row in want] == t.marks


def test_decoder_table():
    rows = SS.decoder_table(5)
    assert len(rows) == 15
    assert {(r["run_start"], r["run_length"]) for r in rows}.__len__() == 15
