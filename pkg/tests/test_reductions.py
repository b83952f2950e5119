import pytest

from hyperq.arith import ArithAssignment, BoundedDomain, eval_arith
from hyperq.formula import (
    And, ArithQ, Atom, Formula, Logic, PropQ, SetQ, TraceQ, all_names, check_sentence, size,
)
from hyperq.reductions import (
    ReductionContext, ReductionError, build_t_alpha, build_theta_all, build_theta_cons,
    h2l_to_hqptlplus, hqptlplus_to_h2l, hyp, instance_formula, live_set_variables, pi_alpha,
    sigma21_to_hyperqptl, translate,
)
from hyperq.semantics import Assignment, EvalParams, eval_hyperqptl, evaluate
from hyperq.syntax import parse
from hyperq.traces import LassoTrace, TraceSet, UniverseParams, enumerate_universe
from hyperq.verify import corpus, small_trace_sets
from structural_cases import CASES

P00 = EvalParams.of(0, 1)
P11 = EvalParams.of(1, 1)


@pytest.mark.parametrize("name", list(CASES))
def test_structural_case(name):
    actual, expected = CASES[name]()
    assert actual == expected


def test_structural_case_count():
    assert len(CASES) >= 28


# -- auxiliary sentences ---------------------------------------------------------


def test_theta_all_on_full_and_deficient_universe():
    U = enumerate_universe({"x", "q"}, UniverseParams(0, 1))
    assert eval_hyperqptl(U, build_theta_all(), P00)
    deficient = TraceSet(U.ap, [t for t in U if not t.holds("x", 0)])
    assert not eval_hyperqptl(deficient, build_theta_all(), P00)


def _marked(stem, loop):
    return LassoTrace({"x", "m1"}, stem, loop)


def test_theta_cons_semantics():
    ok = TraceSet({"x", "m1"}, [_marked([{"x", "m1"}], [set()]), _marked([], [set()])])
    assert eval_hyperqptl(ok, build_theta_cons(1), P11)
    late = TraceSet({"x", "m1"}, [_marked([set(), set(), {"m1"}], [set()])])
    assert not eval_hyperqptl(late, build_theta_cons(1), EvalParams.of(3, 1))
    split = TraceSet({"x", "m1"}, [_marked([{"x", "m1"}], [set()]), _marked([{"x"}], [set()])])
    assert not eval_hyperqptl(split, build_theta_cons(1), P11)
    with pytest.raises(ReductionError):
        build_theta_cons(0)


# -- arithmetic to HyperQPTL ----------------------------------------------------


def _hyp_truth(psi_text, first, second=None, families=(), N=8):
    psi = parse(psi_text, "arith")
    T, markers = build_t_alpha(list(families), N)
    names = [f"YY{j}" for j in range(1, len(families) + 1)]
    h = hyp(psi, markers=dict(zip(names, markers)))
    a = Assignment(pi_alpha(T, first, second or {}, N))
    want = eval_arith(psi, BoundedDomain(N), ArithAssignment(first, second or {}, dict(zip(names, families))))
    return eval_hyperqptl(T, h, EvalParams.of(N, 1), a), want


@pytest.mark.parametrize("z,expected", [(4, True), (6, True), (5, False), (7, False)])
def test_doubling_correspondence(z, expected):
    got, want = _hyp_truth("exists1 y . y + y = z", {"z": z})
    assert got == want == expected


def test_second_order_and_marker_correspondence():
    fam = {frozenset({1, 2}), frozenset()}
    for Z, expected in [({1, 2}, True), ({1}, False), (set(), True)]:
        got, want = _hyp_truth("Z in YY1", {}, {"Z": frozenset(Z)}, [fam])
        assert got == want == expected
    got, want = _hyp_truth("exists2 Y . Y in YY1 & z in Y", {"z": 2}, {}, [fam])
    assert got == want is True


def test_t_alpha_satisfies_the_auxiliary_sentences():
    T, markers = build_t_alpha([{frozenset({0})}], 8)
    params = EvalParams.of(8, 1)
    assert len(T) == 512 and markers == ["m1"]
    assert evaluate(T, build_theta_all(), params)
    assert evaluate(T, build_theta_cons(1), params)
    assert evaluate(T, parse("AXIOM_PLUS_TIMES", "hyperqptl"), params)


def test_sigma21_without_third_order_drops_theta_cons():
    f = sigma21_to_hyperqptl(parse("exists1 y . !(y < y)", "arith"), prenex=False)
    assert "m1" not in all_names(f.root)
    g = sigma21_to_hyperqptl(parse("exists3 YY . forall2 Y . Y in YY", "arith"))
    assert "m1" in all_names(g.root)
    assert check_sentence(g)


def test_shape_violations():
    with pytest.raises(ReductionError):
        sigma21_to_hyperqptl(parse("forall3 YY . true", "arith"))
    with pytest.raises(ReductionError):
        hyp(parse("exists3 YY . true", "arith"))


@pytest.mark.parametrize("n", [0, 1, 6])
def test_instance_formula_pins_n(n):
    from hyperq.arith import build_theta_eq_n

    f = instance_formula(n, parse("x < x | !(x < x)", "arith"))
    assert check_sentence(f)
    theta = build_theta_eq_n(n)
    T, _ = build_t_alpha([], 8)
    h = hyp(theta)
    for v in range(8):
        a = Assignment(pi_alpha(T, {"x": v}, {}, 8))
        assert eval_hyperqptl(T, h, EvalParams.of(8, 1), a) == (v == n)


# -- Hyper2LTL <-> HyperQPTL+ ---------------------------------------------------------


def _dual(src, f, g, sets):
    for T in sets:
        assert evaluate(T, f, P11) == evaluate(T, g, P11), (src, T.sorted())


def test_h2l_example_translation_agrees():
    name, f = corpus("h2l-01")[0]
    _dual(name, f, h2l_to_hqptlplus(f), small_trace_sets())


def test_hqp_example_translation_agrees():
    name, f = corpus("hqp-03")[0]
    _dual(name, f, hqptlplus_to_h2l(f), small_trace_sets())


def test_name_clashes_are_avoided():
    f = parse("existsS m1 . forall p_all in m1 . exists pi in Xd . G (p[p_all] <-> p[pi])", "h2l")
    g = h2l_to_hqptlplus(f)
    assert check_sentence(g)
    _dual("clash", f, g, small_trace_sets())
    f2 = parse("existsP X1 . forall pi . G (X1[pi] <-> p[pi])", "hqptl+")
    _dual("clash", f2, hqptlplus_to_h2l(f2), small_trace_sets())


def test_context_reports_collisions():
    ctx = ReductionContext({"a"})
    assert ctx.new("a") != "a"
    assert ctx.check_fresh()
    ctx.generated.add("a")
    with pytest.raises(ReductionError):
        ctx.check_fresh()


@pytest.mark.parametrize("prefix,target", [("h2l-", "hqptl+"), ("hqp-", "h2l"), ("ar-", "hyperqptl")])
def test_generated_names_are_fresh(prefix, target):
    for name, f in corpus(prefix):
        out = all_names(translate(f, target).root)
        assert check_sentence(translate(f, target)), name
        # everything new in the output is a generated name, distinct from the input's
        assert out - all_names(f.root), name


@pytest.mark.parametrize("prefix,target", [("h2l-", "hqptl+"), ("hqp-", "h2l"), ("ar-", "hyperqptl")])
def test_output_size_is_quadratically_bounded(prefix, target):
    for name, f in corpus(prefix):
        assert size(translate(f, target).root) <= 5 * size(f.root) ** 2, name


def _nested_h2l(k):
    body = Atom("p", "pi0")
    for i in range(k):
        body = And(body, Atom("q", f"pi{i}"))
    for i in reversed(range(k)):
        body = SetQ(True, f"Y{i}", TraceQ(i % 2 == 0, f"pi{i}", body, f"Y{i}"))
    return Formula(Logic.H2L, body)


def _nested_hqp(k):
    body = Atom("p", "pi")
    for i in range(k):
        body = And(body, Atom(f"q{i}", "pi"))
    body = TraceQ(False, "pi", body)
    for i in reversed(range(k)):
        body = PropQ(i % 2 == 0, f"q{i}", body)
    return Formula(Logic.HQPTL_PLUS, body)


def test_size_growth_on_scaling_families():
    for k in (2, 4, 8, 16):
        f = _nested_h2l(k)
        assert size(h2l_to_hqptlplus(f).root) <= 5 * size(f.root) ** 2
        g = _nested_hqp(k)
        assert size(hqptlplus_to_h2l(g).root) <= 5 * size(g.root) ** 2


@pytest.mark.parametrize("prenex", [False, True])
def test_two_live_set_variables(prenex):
    for k in (1, 3, 6):
        assert live_set_variables(hqptlplus_to_h2l(_nested_hqp(k), prenex=prenex)) <= 2


def test_live_set_count_depends_on_prefix_order():
    # binding every set before any trace quantifier keeps all of them live
    f = parse("existsS X1 . forallS X2 . existsS X3 . forall pi in X1 . exists a in X2 . forall b in X3 . "
              "p[pi] | p[a] | p[b]", "h2l")
    assert live_set_variables(f) == 3


def test_translation_errors():
    with pytest.raises(ReductionError):
        translate(parse("forall pi . p[pi]", "hyperqptl"), "h2l")
    with pytest.raises(ReductionError):
        h2l_to_hqptlplus(parse("forall pi in Y . p[pi]", "h2l"))
    with pytest.raises(ReductionError):
        hqptlplus_to_h2l(parse("forall pi . p[rho]", "hqptl+"))
