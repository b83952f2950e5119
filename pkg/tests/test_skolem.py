import random

import pytest
from hypothesis import given, settings, strategies as st

from hyperq.formula import Eventually, Formula, Logic, Next, Not, Or, PAtom, TraceQ
from hyperq.generators import random_assignment, random_qf
from hyperq.semantics import Assignment, EvalParams, eval_hyperqptl
from hyperq.skolem import (
    SkolemError, SkolemFunction, build_expansion, check_consistency, consistent_tables,
    count_consistent_bruteforce, search_skolem, skolem_eval, subformulas,
)
from hyperq.syntax import parse
from hyperq.traces import CapExceeded, LassoTrace, TraceSet
from hyperq.verify import skolem_grid

P = frozenset({"p"})
P01 = EvalParams.of(0, 1)
ALWAYS_P = LassoTrace(P, [], [{"p"}])
NEVER_P = LassoTrace(P, [], [set()])


def Q(stem, loop):
    return LassoTrace({"q"}, stem, loop)


def test_expansion_of_an_always_true_atom():
    t = build_expansion(PAtom("q"), Assignment(props={"q": Q([], [{"q"}])}))
    assert all(t.get(PAtom("q"), i) for i in range(t.n))


def test_expansion_of_eventually_never():
    a = Assignment(traces={"pi": LassoTrace(P, [set()], [set(), set()])})
    psi = parse("forall pi . F p[pi]", "hyperqptl").root.body
    t = build_expansion(psi, a)
    assert not any(t.get(psi, i) for i in range(t.n))


def test_expansion_next_not():
    psi = Next(Not(PAtom("q")))
    a = Assignment(props={"q": Q([{"q"}], [set()])})
    t = build_expansion(psi, a)
    assert t.get(psi, 0) is True
    assert check_consistency(t, a)


def test_flipped_or_cell_is_inconsistent():
    psi = Or(PAtom("q"), Next(PAtom("q")))
    a = Assignment(props={"q": Q([{"q"}, set()], [set()])})
    t = build_expansion(psi, a)
    assert check_consistency(t, a)
    assert not check_consistency(t.flip(t.index(psi), 1), a)


def test_eventually_without_witness_is_inconsistent():
    psi = Eventually(PAtom("q"))
    a = Assignment(props={"q": Q([], [set()])})
    t = build_expansion(psi, a)
    bad = t.flip(t.index(psi), 0)
    assert not check_consistency(bad, a)
    # making every F-cell true is self-supporting under plain local rules, but not under reachability
    all_on = t
    for i in range(t.n):
        if not all_on.get(psi, i):
            all_on = all_on.flip(all_on.index(psi), i)
    assert not check_consistency(all_on, a)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_unique_consistent_table(seed):
    rng = random.Random(seed)
    psi = random_qf(rng, ["pi"], ["p"], 2, ["q"])
    a = random_assignment(rng, ["pi"], ["p"], ["q"], max_stem=1, max_loop=2)
    try:
        tables = consistent_tables(psi, a, limit_bits=16)
    except CapExceeded:
        return
    assert tables == [build_expansion(psi, a)]
    if len(subformulas(psi)) * tables[0].n <= 12:
        assert count_consistent_bruteforce(psi, a) == 1


def test_skolem_eval_exists_p_trace():
    T = TraceSet(P, [NEVER_P, ALWAYS_P])
    phi = parse("exists pi . p[pi]", "hyperqptl")
    s = {"pi": SkolemFunction("pi", "trace", (), {(): ALWAYS_P})}
    assert skolem_eval(T, phi, s, P01)


def test_skolem_eval_hand_built_prop_table():
    T = TraceSet(P, [NEVER_P, ALWAYS_P])
    phi = parse("forall pi . existsP q . G (q <-> p[pi])", "hyperqptl")
    table = {(NEVER_P,): Q([], [set()]), (ALWAYS_P,): Q([], [{"q"}])}
    assert skolem_eval(T, phi, {"q": SkolemFunction("q", "prop", ("pi",), table)}, P01)


def test_adversarial_table_fails_while_sentence_holds():
    T = TraceSet(P, [NEVER_P, ALWAYS_P])
    phi = parse("exists pi . p[pi]", "hyperqptl")
    assert eval_hyperqptl(T, phi, P01)
    wrong = {"pi": SkolemFunction("pi", "trace", (), {(): NEVER_P})}
    assert not skolem_eval(T, phi, wrong, P01)


def test_skolem_errors():
    T = TraceSet(P, [NEVER_P])
    phi = parse("exists pi . p[pi]", "hyperqptl")
    with pytest.raises(SkolemError):
        skolem_eval(T, phi, {}, P01)
    with pytest.raises(SkolemError):
        SkolemFunction("pi", "trace", (), {})(())
    with pytest.raises(SkolemError):
        search_skolem(T, parse("exists pi . p[pi]", "hqptl+"), P01)


def test_search_fails_without_witness():
    assert search_skolem(TraceSet(P, [NEVER_P]), parse("exists pi . p[pi]", "hyperqptl"), P01) is None


def test_search_returns_first_witness_deterministically():
    T = TraceSet(P, [NEVER_P, ALWAYS_P])
    phi = parse("forall pi . exists rho . G (p[pi] <-> p[rho])", "hyperqptl")
    fam = search_skolem(T, phi, P01)
    assert fam["rho"].signature == ("pi",)
    assert fam["rho"].table == {(t,): t for t in T.sorted()}
    assert search_skolem(T, phi, P01)["rho"].table == fam["rho"].table


def test_signature_includes_preceding_prop_universals():
    T = TraceSet(P, [NEVER_P, ALWAYS_P])
    phi = parse("forallP r . forall pi . existsP q . G (q <-> (p[pi] | r))", "hyperqptl")
    fam = search_skolem(T, phi, P01)
    assert fam["q"].signature == ("r", "pi")
    assert len(fam["q"].table) == 2 * 2


def test_search_agrees_with_direct_evaluation_on_a_grid_slice():
    for T, phi in skolem_grid(seed=3, per_prefix=1)[::7]:
        fam = search_skolem(T, phi, P01)
        assert (fam is not None) == eval_hyperqptl(T, phi, P01)
        if fam is not None:
            assert skolem_eval(T, phi, fam, P01)


def test_vacuous_universal_never_changes_success():
    for T, phi in skolem_grid(seed=4, per_prefix=1)[::11]:
        base = search_skolem(T, phi, P01) is not None
        wrapped = Formula(Logic.HYPERQPTL, TraceQ(False, "zz", phi.root))
        assert (search_skolem(T, wrapped, P01) is not None) == base
