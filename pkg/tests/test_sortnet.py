import itertools

import pytest
from hypothesis import given, settings, strategies as st

from retrograde import sortnet as S

M = S.Marked


def test_parse_and_format_roundtrip():
    text = S.NET4.format()
    assert S.parse_network(text) == S.NET4
    assert S.NET4.depth == 3 and S.NET4.m == 5


@pytest.mark.parametrize("text", [
    "wires 3\nstage 0: 1 0\n",  # i >= j
    "wires 3\nstage 0: 0 5\n",  # wire out of range
    "wires 3\nstage 1: 0 1\nstage 0: 1 2\n",  # stages go backwards
    "wires 3\nstage 0: 0 1\nstage 0: 1 2\n",  # wire reused within a stage
    "stage 0: 0 1\n",  # no header
    "wires 3\nstage x: 0 1\n",
])
def test_malformed_networks(text):
    with pytest.raises(S.NetworkError):
        S.parse_network(text)


def test_sort_forward_examples():
    assert S.sort_forward(S.NET3, (1, 0, 1)) == (0, 1, 1)
    assert S.sort_forward(S.NET4, (3, 2, 1, 0)) == (0, 1, 2, 3)
    for net in (S.NET3, S.NET4, S.NET4_BROKEN):
        assert S.sort_forward(net, (0,) * net.wires) == (0,) * net.wires


def test_zero_one_examples():
    r = S.verify_zero_one(S.NET3)
    assert r.passed and r.cases == 8
    assert S.verify_zero_one(S.Network(1, ())).passed
    broken = S.verify_zero_one(S.NET4_BROKEN)
    assert not broken.passed and broken.witnesses
    for v, out in broken.witnesses:
        assert S.sort_forward(S.NET4_BROKEN, v) == out and list(out) != sorted(out)


def test_retro_3net_figure():
    r = S.retro_predecessors(S.NET3, "011")
    assert r.predecessors == {(0, 1, 1), (1, 0, 1), (1, 1, 0)}


@pytest.mark.parametrize("net", [S.NET3, S.NET4, S.batcher(6)])
def test_retro_all_zeros(net):
    zero = "0" * net.wires
    assert S.retro_predecessors(net, zero).predecessors == {(0,) * net.wires}
    one = "1" * net.wires
    assert S.retro_predecessors(net, one).predecessors == {(1,) * net.wires}


def test_retro_4net_permutations():
    r = S.retro_predecessors(S.NET4, (0, 1, 2, 3), "distinct")
    assert r.predecessors == set(itertools.permutations(range(4)))


def test_base_mode():
    r = S.verify_retrograde_base(S.NET3)
    assert r.passed and r.sizes == [1, 3, 3, 1]
    assert S.verify_retrograde_base(S.Network(1, ())).passed
    b = S.verify_retrograde_base(S.NET4_BROKEN)
    assert not b.passed
    assert {(0, 1, 0, 1), (1, 0, 1, 0)} <= set(b.missing)


def test_single_test_4net():
    r = S.verify_single_test(S.NET4)
    assert r.passed and r.count == 24
    assert r.identity_lhs == 2 ** 5 - 24 == 8 == r.identity_rhs


def test_single_test_trivial():
    r = S.verify_single_test(S.Network(1, ()))
    assert r.passed and r.identity_lhs == 0 == r.identity_rhs


def test_single_test_mutant():
    r = S.verify_single_test(S.NET4_BROKEN)
    assert not r.passed and r.missing
    for perm in r.missing:
        assert S.sort_forward(S.NET4_BROKEN, perm) != (0, 1, 2, 3)


def test_equivalence_small():
    e = S.equivalence_check(S.Network.from_pairs(2, [(0, 1)]))
    assert e.forward and e.zero_one and e.single and e.agree


def test_equivalence_corpora():
    good = S.correct_corpus()
    assert len(good) >= 20
    for name, net in good.items():
        e = S.equivalence_check(net)
        assert e.agree and e.passed, name
    bad = S.mutant_corpus(50, seed=0)
    assert len(bad) == 50
    for net in bad:
        e = S.equivalence_check(net)
        assert e.agree and not e.forward


def test_clash_examples():
    assert not S.clash_analysis(S.NET4).clashes
    assert S.clash_analysis(S.Network.from_pairs(2, [(0, 1)])).connected
    d = S.clash_analysis(S.NET4_CLASH)
    assert d.connected
    assert [S.fmt_state(c.input) for c in d.clashes] == ["1100"]
    assert S.sort_forward(S.NET4_CLASH, (1, 1, 0, 0)) != (0, 0, 1, 1)


def test_marked_example():
    out = (M(0), M(1), M(3, 0), M(3, 1))
    r = S.retro_predecessors(S.NET4, out, "marked")
    assert len(r.predecessors) == 48
    assert {S.unmark(p) for p in r.predecessors} == {
        p for p in itertools.permutations((0, 1, 3, 3)) if S.sort_forward(S.NET4, p) == (0, 1, 3, 3)}


def test_exports():
    r = S.retro_predecessors(S.NET4, (0, 1, 2, 3), "distinct")
    csv = S.d_profile_csv(r).splitlines()
    assert csv[0].startswith("k,comparator") and len(csv) == 1 + S.NET4.m
    assert S.network_dot(S.NET4).startswith("digraph")
    assert "digraph" in S.path_dot(S.clash_analysis(S.NET4_CLASH))


def test_constructions_sort():
    for n in range(2, 9):
        for name, build in S.CONSTRUCTIONS.items():
            if name == "optimal" and n not in S.OPTIMAL:
                continue
            assert S.verify_zero_one(build(n)).passed, (name, n)


def test_zero_one_large():
    assert S.verify_zero_one(S.batcher(16)).passed
    assert S.verify_zero_one(S.bubble(20)).passed


# -- properties ----------------------------------------------------------

@st.composite
def networks(draw, lo=2, hi=6):
    n = draw(st.integers(lo, hi))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                          .filter(lambda t: t[0] != t[1]).map(lambda t: tuple(sorted(t))),
                          max_size=12))
    return S.Network.from_pairs(n, pairs)


@settings(max_examples=60, deadline=None)
@given(networks())
def test_duality_bits(net):
    n = net.wires
    image = {}
    for v in itertools.product((0, 1), repeat=n):
        image.setdefault(S.sort_forward(net, v), set()).add(v)
    for out in itertools.product((0, 1), repeat=n):
        preds = S.retro_predecessors(net, S.ValueVec(out, "bits")).predecessors
        assert preds == image.get(out, set())


@settings(max_examples=25, deadline=None)
@given(networks(2, 7), st.randoms(use_true_random=False))
def test_duality_distinct(net, rnd):
    n = net.wires
    image = {}
    for v in itertools.permutations(range(n)):
        image.setdefault(S.sort_forward(net, v), set()).add(v)
    outs = list(image)[:3] + [tuple(rnd.sample(range(n), n))]
    for out in outs:
        assert S.retro_predecessors(net, out, "distinct").predecessors == image.get(out, set())


@settings(max_examples=60, deadline=None)
@given(networks(), st.data())
def test_conservation(net, data):
    out = tuple(data.draw(st.lists(st.integers(0, 1), min_size=net.wires, max_size=net.wires)))
    for p in S.retro_predecessors(net, S.ValueVec(out, "bits")).predecessors:
        assert sorted(p) == sorted(out)


@settings(max_examples=60, deadline=None)
@given(networks(), st.data())
def test_recurrence_and_identity(net, data):
    mode = data.draw(st.sampled_from(["bits", "distinct"]))
    if mode == "bits":
        out = S.ValueVec(data.draw(st.lists(st.integers(0, 1), min_size=net.wires,
                                            max_size=net.wires)), "bits")
    else:
        out = S.ValueVec(data.draw(st.permutations(range(net.wires))), "distinct")
    r = S.retro_predecessors(net, out)
    prev = 1
    for s in r.stages:
        assert s.before == prev
        assert s.after == 2 * s.before - s.d
        assert s.d == s.impossible + s.repeated
        prev = s.after
    assert prev == len(r.predecessors)
    lhs, rhs = r.identity()
    assert lhs == rhs == 2 ** net.m - len(r.predecessors)


@settings(max_examples=60, deadline=None)
@given(networks(2, 5), st.data())
def test_marked_subsumes_copy(net, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=net.wires, max_size=net.wires))
    out = sorted(bits)
    counts = {0: 0, 1: 0}
    marked = []
    for b in out:
        marked.append(M(b, counts[b]))
        counts[b] += 1
    copy = S.retro_predecessors(net, S.ValueVec(out, "bits")).predecessors
    rich = S.retro_predecessors(net, S.ValueVec(marked, "marked")).predecessors
    assert {S.unmark(p) for p in rich} == copy


def test_mutate_is_seeded():
    a = [n.format() for n in S.mutant_corpus(10, seed=7)]
    b = [n.format() for n in S.mutant_corpus(10, seed=7)]
    assert a == b
