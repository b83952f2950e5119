import itertools
import json

import pytest
from hypothesis import given, strategies as st

from hyperq.traces import (
    AlphabetError, CapExceeded, LassoTrace, TraceSet, TransitionSystem, UniverseParams,
    enumerate_universe, equal_modulo, lasso, override_prop, pointwise_union, projection, rows,
    system_from_json, system_to_json, trace_set_from_json, trace_set_to_json, traces_of_system,
)

P = frozenset({"p"})


def word(t, n):
    return tuple(t.value_at(i) for i in range(n))


letters = st.frozensets(st.sampled_from(["p", "q"]))
lassos = st.builds(lambda s, l: LassoTrace({"p", "q"}, s, l),
                   st.lists(letters, max_size=4), st.lists(letters, min_size=1, max_size=3))


@given(lassos)
def test_canonical_form_preserves_the_word(t):
    raw_equivalent = LassoTrace(t.ap, list(t.stem) + list(t.loop), list(t.loop) * 2)
    assert raw_equivalent == t
    assert word(raw_equivalent, 20) == word(t, 20)


@given(lassos, lassos)
def test_equality_iff_same_infinite_word(t, u):
    # stems <= 4, loops <= 3: agreement on 4 + 2*lcm positions decides equality
    assert (t == u) == (word(t, 4 + 12) == word(u, 4 + 12))


def test_canonical_examples():
    t = LassoTrace(P, [{"p"}, set()], [{"p"}, set()])
    assert t.stem == () and len(t.loop) == 2
    assert LassoTrace(P, [], [set(), set()]).loop == (frozenset(),)


def test_alphabet_violation():
    with pytest.raises(AlphabetError):
        LassoTrace(P, [{"q"}], [set()])
    with pytest.raises(ValueError):
        LassoTrace(P, [], [])


@pytest.mark.parametrize("k,sigma,lam", [(1, 0, 1), (1, 1, 1), (1, 2, 2), (2, 1, 1), (2, 1, 2), (1, 3, 3)])
def test_universe_matches_brute_force_word_count(k, sigma, lam):
    ap = ["p", "q"][:k]
    U = enumerate_universe(ap, UniverseParams(sigma, lam))
    alphabet = [frozenset(c) for r in range(k + 1) for c in itertools.combinations(ap, r)]
    words = set()
    horizon = sigma + 2 * 6
    for s in range(sigma + 1):
        for stem in itertools.product(alphabet, repeat=s):
            for l in range(1, lam + 1):
                for loop in itertools.product(alphabet, repeat=l):
                    w = list(stem) + list(loop) * horizon
                    words.add(tuple(w[:horizon]))
    assert len(U) == len(words)
    for t in U:
        assert len(t.stem) <= sigma and len(t.loop) <= lam


def test_rows_and_cap():
    assert len(rows("q", UniverseParams(0, 1))) == 2
    with pytest.raises(CapExceeded):
        enumerate_universe(["a", "b", "c", "d"], UniverseParams(2, 2), cap=100)


def test_projection_union_override():
    t = lasso([{"p", "q"}], [{"q"}])
    assert projection(t, {"p"}) == LassoTrace(P, [{"p"}], [set()])
    u = pointwise_union(projection(t, {"p"}), LassoTrace({"r"}, [], [{"r"}, set()]))
    assert u.value_at(0) == {"p", "r"} and u.value_at(1) == frozenset() and u.value_at(2) == {"r"}
    with pytest.raises(AlphabetError):
        pointwise_union(t, t)
    T = TraceSet({"p", "q"}, [t])
    row = LassoTrace({"q"}, [], [set()])
    T2 = override_prop(T, "q", row)
    assert all(not x.holds("q", i) for x in T2 for i in range(5))
    assert equal_modulo(T, T2, {"p"}) and not equal_modulo(T, T2, {"q"})


def test_trace_set_json_round_trip(tmp_path):
    T = enumerate_universe(["p"], UniverseParams(1, 1))
    path = tmp_path / "t.json"
    path.write_text(json.dumps(trace_set_to_json(T)))
    assert trace_set_from_json(str(path)) == T


def _toggle():
    return TransitionSystem({"p"}, ["a", "b"], [("a", "b"), ("b", "a"), ("b", "b")], ["a"], {"b": ["p"]})


def test_system_traces_are_paths():
    ts = _toggle()
    T = traces_of_system(ts, UniverseParams(1, 2))
    for t in T:
        assert not t.holds("p", 0)
        # no two consecutive positions without p (a never follows a)
        assert all(t.holds("p", i) or t.holds("p", i + 1) for i in range(10))
    assert LassoTrace({"p"}, [set()], [{"p"}]) in T
    assert LassoTrace({"p"}, [], [set(), {"p"}]) in T


def test_system_json_round_trip_and_validation():
    ts = _toggle()
    assert system_from_json(system_to_json(ts)) == ts
    with pytest.raises(ValueError):
        TransitionSystem({"p"}, ["a"], [], ["a"], {})
    with pytest.raises(ValueError):
        TransitionSystem({"p"}, ["a"], [("a", "a")], ["z"], {})
