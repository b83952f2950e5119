"""Evaluator checks, each against an independent reference: the explicit
unrolling for quantifier-free formulas and the literal brute-force oracle for
quantified sentences."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from hyperq.formula import Logic
from hyperq.generators import random_assignment, random_qf, random_sentence
from hyperq.oracle import oracle
from hyperq.semantics import (
    PT_PROPS, Assignment, EvalParams, EvaluationError, bounded_plus_times, eval_axiom_plus_times,
    eval_hyper2ltl, eval_hyperqptl, eval_hyperqptl_plus, eval_qf, eval_qf_reference, evaluate,
    plus_times_trace, t_plus_times_member,
)
from hyperq.syntax import parse
from hyperq.traces import CapExceeded, LassoTrace, TraceSet, UniverseParams, enumerate_universe
from hyperq.verify import eval_unrolled, small_trace_sets

P11 = EvalParams.of(1, 1)
P = frozenset({"p"})


def T_of(*words):
    return TraceSet(P, [LassoTrace(P, s, l) for s, l in words])


CONST_P = LassoTrace(P, [], [{"p"}])
CONST_NP = LassoTrace(P, [], [set()])
FLIP = LassoTrace(P, [{"p"}], [set()])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_eval_qf_matches_unrolling(seed):
    rng = random.Random(seed)
    tv = ["pi", "rho"][: rng.randint(1, 2)]
    psi = random_qf(rng, tv, ["p", "a"], 4, ["q"])
    a = random_assignment(rng, tv, ["p", "a"], ["q"])
    want = eval_unrolled(a, psi)
    assert [eval_qf(a, i, psi) for i in range(len(want))] == want
    assert [eval_qf_reference(a, i, psi) for i in range(len(want))] == want


def test_eval_qf_positions_beyond_the_loop_wrap():
    a = Assignment(traces={"pi": LassoTrace(P, [set()], [{"p"}, set()])})
    psi = parse("forall pi . p[pi]", "hyperqptl").root.body
    assert [eval_qf(a, i, psi) for i in range(6)] == [False, True, False, True, False, True]


def test_unbound_variable_is_an_error():
    f = parse("forall pi . p[pi] & p[rho]", "hyperqptl")
    with pytest.raises(EvaluationError):
        evaluate(T_of(([], [{"p"}])), f, P11)


@pytest.mark.parametrize("logic,n", [("hyperqptl", 600), ("h2l", 600), ("hqptl+", 200)])
def test_fast_evaluator_agrees_with_oracle(logic, n):
    rng = random.Random(5)
    sets = small_trace_sets()
    checked = 0
    for _ in range(n):
        f = random_sentence(rng, logic, max_pq=1 if logic == "hqptl+" else 2)
        T = rng.choice(sets)
        try:
            want = oracle(T, f, P11)
        except CapExceeded:
            continue
        assert evaluate(T, f, P11) == want, (str(f), T.sorted())
        checked += 1
    assert checked >= n // 2


def test_uniform_versus_per_trace_quantification():
    T = TraceSet(P, [CONST_P, CONST_NP])
    uniform = parse("existsP q . forall pi . G (q <-> p[pi])", "hyperqptl")
    relabel = parse("existsP q . forall pi . G (q[pi] <-> p[pi])", "hqptl+")
    assert not eval_hyperqptl(T, uniform, P11)
    assert eval_hyperqptl_plus(T, relabel, P11)
    T1 = TraceSet(P, [FLIP])
    assert eval_hyperqptl(T1, uniform, P11)


def test_uniform_quantifier_is_bounded():
    # the row "p only at position 2" needs stem 2, unavailable at sigma=1
    T = TraceSet(P, [LassoTrace(P, [set(), set(), {"p"}], [set()])])
    f = parse("existsP q . forall pi . G (q <-> p[pi])", "hyperqptl")
    assert not eval_hyperqptl(T, f, P11)
    assert eval_hyperqptl(T, f, EvalParams.of(3, 1))


def test_second_order_example_needs_constant_traces():
    f = parse("existsS X . (forall pi in Xd . exists pi2 in X . G (p[pi] <-> p[pi2])) & "
              "forall pi in X . (G p[pi] | G !p[pi])", "h2l")
    assert eval_hyper2ltl(TraceSet(P, [CONST_P, CONST_NP]), f, P11)
    assert not eval_hyper2ltl(TraceSet(P, [CONST_P, FLIP]), f, P11)
    assert oracle(TraceSet(P, [CONST_P, FLIP]), f, P11) is False


def test_all_traces_set_differs_from_model():
    T = TraceSet(P, [CONST_P])
    assert eval_hyper2ltl(T, parse("forall pi in Xd . G p[pi]", "h2l"), P11)
    assert not eval_hyper2ltl(T, parse("forall pi in Xa . G p[pi]", "h2l"), P11)


def test_empty_set_quantifier_branch():
    T = TraceSet(P, [CONST_P])
    f = parse("existsS X . forall pi in X . false", "h2l")
    assert eval_hyper2ltl(T, f, P11)
    g = parse("forallS X . exists pi in X . true", "h2l")
    assert not eval_hyper2ltl(T, g, P11)


def test_set_assignment():
    T = TraceSet(P, [CONST_P, CONST_NP])
    f = parse("forall pi in Y . G p[pi]", "h2l")
    assert eval_hyper2ltl(T, f, P11, Assignment(sets={"Y": frozenset([CONST_P])}))
    assert not eval_hyper2ltl(T, f, P11, Assignment(sets={"Y": T.members}))


def test_plus_times_membership():
    assert t_plus_times_member(plus_times_trace(1, 2, 3, "add"))
    assert t_plus_times_member(plus_times_trace(2, 3, 6, "mult"))
    assert not t_plus_times_member(plus_times_trace(1, 2, 4, "add"))
    assert not t_plus_times_member(plus_times_trace(2, 2, 5, "mult"))


def test_axiom_stand_in():
    params = EvalParams.of(4, 1)
    T = bounded_plus_times(4)
    assert eval_axiom_plus_times(T, params)
    smaller = TraceSet(PT_PROPS, list(T.members)[1:])
    assert not eval_axiom_plus_times(smaller, params)
    f = parse("AXIOM_PLUS_TIMES", "hyperqptl")
    assert evaluate(T, f, params)


def test_universe_quantification_matches_enumeration():
    U = enumerate_universe(P, UniverseParams(1, 1))
    f = parse("forall pi in Xa . exists pi2 in Xd . G (p[pi] <-> p[pi2])", "h2l")
    assert eval_hyper2ltl(U, f, P11)
    assert not eval_hyper2ltl(TraceSet(P, list(U.members)[:2]), f, P11)


SUGAR_CASES = [
    ("hyperqptl", "forall pi . p[pi] U !p[pi]"),
    ("hyperqptl", "exists pi . !p[pi] U p[pi]"),
    ("hqptl+", "forall pi . p[pi] U !p[pi]"),
    ("hqptl+", "exists pi . true U p[pi]"),
    ("h2l", "forall pi in Xd . p[pi] U !p[pi]"),
    ("h2l", "exists pi in Xd . G p[pi] | F !p[pi]"),
]


@pytest.mark.parametrize("logic,text", SUGAR_CASES)
def test_sugar_expansion_is_core_and_equivalent(logic, text):
    from hyperq.formula import CORE, expand_sugar, walk

    f = parse(text, logic)
    g = expand_sugar(f)
    assert {type(n) for n in walk(g.root)} <= CORE[g.logic]
    # bounds leave room for the witness row of U
    params = EvalParams.of(2, 1)
    for T in small_trace_sets():
        assert evaluate(T, f, params) == evaluate(T, g, params)
