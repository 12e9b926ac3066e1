from fractions import Fraction

from hypothesis import given, settings, strategies as st

from retrograde.constraint import (
    EMPTY, NONEMPTY, AllIntegers, Complement, Finite, Intersection, Interval, LinearRelation,
    Poly, Pred, Shift, Union, check, enumerate_set, from_json, is_empty, member, normalize,
    overflow_variants, halving_distance_system, solve_center_equation, solve_distance_system,
    to_json, to_text,
)

B_REL = LinearRelation("b", (("a", Fraction(-1)),), Fraction(5))  # b = 5 - a


def test_member_shift():
    assert member(Shift(AllIntegers("e"), 1), 6, {"e": 5})
    assert not member(Shift(AllIntegers("e"), 1), 5, {"e": 5})


def test_member_relation_and_complement():
    assert member(B_REL, 3, {"a": 2})
    assert not member(Complement(B_REL), 3, {"a": 2})
    assert to_text(B_REL) == "Z_{5-a}"


def test_is_empty_examples():
    assert is_empty(Intersection((Interval(3, 5), Interval(6, 9)))) == EMPTY
    assert is_empty(AllIntegers()) == NONEMPTY
    assert is_empty(Intersection((B_REL, Complement(B_REL)))) == EMPTY


def test_normalize_rules():
    assert normalize(Shift(Shift(AllIntegers("e"), 1), 2)) == Shift(AllIntegers("e"), 3)
    assert normalize(Complement(Complement(B_REL))) == normalize(B_REL)


def test_json_roundtrip():
    s = Intersection((Interval(None, 4), Complement(B_REL), Finite((1, 2, 3))))
    assert from_json(to_json(s)) == s


def test_center_equation_examples():
    assert solve_center_equation(4) == [4, 5]
    assert solve_center_equation(0) == [0, 1]
    p = Poly.var("p")
    assert solve_center_equation(p) == [p, p + 1]


def test_center_equation_brute_force():
    for p in range(0, 257):
        sols = {q for q in range(0, 257) if (p + q) // 2 == p}
        assert sols == set(solve_center_equation(p)) & set(range(257))


def test_distance_system_halving():
    assert solve_distance_system(halving_distance_system())["solution"] == [1]


def test_distance_system_relaxed_matches_enumeration():
    r = solve_distance_system(halving_distance_system(with_upper=False))
    assert r["unbounded"]
    box = range(0, 24)

    def feasible(k):
        for u in box:
            for l in box:
                # u changed last
                uo, lo = (u + l) // 2, l
                if u - l > 1 and uo - lo == k:
                    return True
                # l changed last
                uo, lo = u, (u + l) // 2
                if u - l > 1 and uo - lo == k:
                    return True
        return False

    intervals = [s["interval"] for b in r["branches"] for s in b if s["feasible"]]
    for k in range(0, 9):
        solved = any(lo <= k and (hi is None or k <= hi) for lo, hi in intervals)
        assert solved == feasible(k), k


def test_distance_system_empty():
    assert solve_distance_system([])["solution"] == "all"


def test_check_refutes_contradiction():
    a = Poly.var("a")
    assert check([Pred.cmp(">", a, 3), Pred.cmp("<", a, 2)]) == EMPTY
    assert check([Pred.cmp(">", a, 3)]) == NONEMPTY


def test_wrap_mode_overflow_relation():
    # b = 5 - a + M is satisfiable modulo 2^w but not over the integers
    w = 8
    over = overflow_variants(B_REL, w)[-1]
    env = {"a": 2}
    b = 3 + (1 << w)
    assert member(over, b, env) and not member(B_REL, b, env)
    assert member(B_REL, b, env, width=w)


# random sets over relation variables x, y

_LEAF = st.one_of(
    st.just(AllIntegers()),
    st.sampled_from([AllIntegers("x"), AllIntegers("y")]),
    st.builds(lambda vs: Finite(tuple(sorted(set(vs)))), st.lists(st.integers(-10, 10), max_size=4)),
    st.builds(Interval, st.one_of(st.none(), st.integers(-10, 10)),
              st.one_of(st.none(), st.integers(-10, 10))),
    st.builds(lambda c, k: LinearRelation("v", (("x", Fraction(c)),), Fraction(k)),
              st.sampled_from([-2, -1, 1, 2]), st.integers(-5, 5)),
)
_SET = st.recursive(_LEAF, lambda s: st.one_of(
    st.builds(Shift, s, st.integers(-5, 5)),
    st.builds(Complement, s),
    st.builds(lambda ps: Intersection(tuple(ps)), st.lists(s, min_size=1, max_size=3)),
    st.builds(lambda ps: Union(tuple(ps)), st.lists(s, min_size=1, max_size=3)),
), max_leaves=6)
_ENV = st.fixed_dictionaries({"x": st.integers(-6, 6), "y": st.integers(-6, 6)})


@settings(max_examples=2000, deadline=None)
@given(_SET, st.integers(-20, 20), _ENV)
def test_normalize_preserves_membership(s, v, env):
    n = normalize(s)
    assert normalize(n) == n
    assert member(n, v, env) == member(s, v, env)


@settings(max_examples=200, deadline=None)
@given(_SET, _ENV)
def test_is_empty_never_wrong_on_witness(s, env):
    if enumerate_set(s, (-32, 32), env):
        assert is_empty(s) != EMPTY
