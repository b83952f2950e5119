import random

import pytest
from hypothesis import given, settings, strategies as st

from hyperq.formula import (
    XD, And, Atom, Formula, Globally, Iff, Logic, LogicError, Not, Or, PAtom, PrenexError, PropQ,
    SetQ, TraceQ, check_sentence, free_vars, is_prenex, to_prenex,
)
from hyperq.generators import random_formula
from hyperq.syntax import ParseError, format_file, parse, parse_file_text, print_formula
from hyperq.verify import corpus, corpus_files

LOGICS = list(Logic)


def test_spec_example_h2l_parses_to_expected_tree():
    f = parse("existsS X . forall pi in Xd . exists pi2 in X . G (p[pi] <-> p[pi2])", "h2l")
    assert f.root == SetQ(True, "X", TraceQ(False, "pi", TraceQ(
        True, "pi2", Globally(Iff(Atom("p", "pi"), Atom("p", "pi2"))), "X"), XD))


def test_uniform_prop_atom_in_hyperqptl():
    f = parse("existsP q . forall pi . G (q <-> p[pi])", "hyperqptl")
    assert f.root == PropQ(True, "q", TraceQ(False, "pi", Globally(Iff(PAtom("q"), Atom("p", "pi")))))


def test_precedence_and_binds_tighter_than_or():
    f = parse("forall pi . p[pi] | q[pi] & r[pi]", "hyperqptl")
    assert f.root.body == Or(Atom("p", "pi"), And(Atom("q", "pi"), Atom("r", "pi")))


def test_not_applies_to_atom_only():
    f = parse("forall pi . !p[pi] & q[pi]", "hyperqptl")
    assert f.root.body == And(Not(Atom("p", "pi")), Atom("q", "pi"))


@pytest.mark.parametrize("logic", LOGICS, ids=lambda l: l.value)
def test_fuzzed_round_trip(logic):
    rng = random.Random(11)
    for _ in range(300):
        f = random_formula(rng, logic, 5)
        assert parse(print_formula(f), logic) == f


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 9), st.sampled_from(LOGICS))
def test_round_trip_property(seed, logic):
    f = random_formula(random.Random(seed), logic, 4)
    assert parse(print_formula(f), logic) == f


def test_corpus_is_large_and_round_trips():
    files = corpus()
    assert len(files) >= 30
    for name, f in files:
        assert check_sentence(f), name
        assert parse(print_formula(f), f.logic) == f, name


def test_format_file_header_round_trip():
    _, f = corpus("h2l-")[0]
    text = format_file(f, comment="x")
    assert text.startswith("#logic: h2l")
    assert parse_file_text(text) == f


def test_header_is_required_without_logic_argument():
    with pytest.raises(ParseError):
        parse_file_text("forall pi . p[pi]")


# ill-formed inputs: (logic, text)
NEGATIVE = [
    ("hyperqptl", "existsS X . forall pi in X . p[pi]"),       # set quantifier outside Hyper2LTL
    ("hqptl+", "existsS X . forall pi in X . p[pi]"),
    ("hyperqptl", "forall pi in Xd . p[pi]"),                   # membership quantifier
    ("hqptl+", "exists pi in Xa . p[pi]"),
    ("h2l", "forall pi . p[pi]"),                               # Hyper2LTL needs a domain
    ("h2l", "existsP q . forall pi in Xd . q[pi]"),             # prop quantifier in Hyper2LTL
    ("hqptl+", "existsP q . forall pi . G (q <-> p[pi])"),      # unlabeled atom in HyperQPTL+
    ("h2l", "forall pi in Xd . q"),
    ("h2l", "existsS Xd . forall pi in Xd . p[pi]"),            # distinguished variable rebound
    ("h2l", "forallS Xa . forall pi in Xa . p[pi]"),
    ("hyperqptl", "exists1 y . y < y"),                         # arithmetic in a temporal logic
    ("h2l", "forall pi in Xd . exists2 Y . true"),
    ("arith", "forall pi . p[pi]"),                             # trace quantifier in arithmetic
    ("arith", "exists1 y . G y < y"),                           # temporal operator in arithmetic
    ("arith", "exists1 y . X (y = y)"),
    ("arith", "existsP q . true"),
    ("arith", "exists2 Y . exists1 y . Y < y"),                 # order clash
    ("arith", "exists1 y . exists2 Y . y in y"),
    ("arith", "exists2 Y . Y + Y = Y"),
    ("arith", "exists3 YY . exists1 y . y in YY"),
    ("hqptl+", "AXIOM_PLUS_TIMES"),                             # axiom is HyperQPTL only
    ("h2l", "AXIOM_PLUS_TIMES"),
    ("hyperqptl", "forall pi . p[pi] &"),                       # plain syntax errors
    ("hyperqptl", "forall pi . (p[pi]"),
    ("hyperqptl", "forall . p[pi]"),
    ("arith", "exists4 y . true"),
]


@pytest.mark.parametrize("logic,text", NEGATIVE)
def test_negative_corpus_is_rejected(logic, text):
    with pytest.raises((ParseError, LogicError)):
        parse(text, logic)


def test_negative_corpus_size():
    assert len(NEGATIVE) >= 20


def test_error_carries_position():
    with pytest.raises(ParseError) as e:
        parse("forall pi .\n  p[pi] & & q[pi]", "hyperqptl")
    assert "2" in str(e.value)


def test_free_vars_and_sentence_check():
    f = parse("forall pi . p[pi] & q[rho]", "hyperqptl")
    assert "rho" in free_vars(f)[0]
    assert not check_sentence(f)


def test_ast_construction_validates_logic():
    with pytest.raises(LogicError):
        Formula(Logic.H2L, TraceQ(True, "pi", Atom("p", "pi")))


@pytest.mark.parametrize("prefix", ["hq-", "hqp-", "h2l-"])
def test_prenex_form_is_prenex_and_equivalent(prefix):
    from hyperq.semantics import EvalParams, evaluate
    from hyperq.verify import small_trace_sets

    refused = []
    for name, f in corpus(prefix):
        try:
            g = to_prenex(f)
        except PrenexError:
            refused.append(name)
            continue
        assert is_prenex(g.root), name
        assert g.logic == f.logic
        assert to_prenex(g) == g
        if prefix != "hq-":
            for T in small_trace_sets():
                assert evaluate(T, f, EvalParams.of(1, 1)) == evaluate(T, g, EvalParams.of(1, 1)), name
    # a membership quantifier over a possibly empty set under <-> has no prenex form
    assert refused == (["h2l-18.hq"] if prefix == "h2l-" else [])


def test_prenex_refuses_hoisting_over_a_possibly_empty_set():
    f = parse("forallS X . (exists pi in Xd . p[pi]) | (exists rho in X . p[rho])", "h2l")
    with pytest.raises(PrenexError):
        to_prenex(f)
    # with X known to be inhabited the hoist is fine
    g = parse("forallS X . (exists pi in X . p[pi]) & (exists rho in X . p[rho])", "h2l")
    assert is_prenex(to_prenex(g).root)


def test_prenex_rejects_quantifier_under_temporal_operator():
    with pytest.raises(PrenexError):
        to_prenex(parse("G (forall pi . p[pi])", "hyperqptl"))


def test_prenex_example():
    f = parse("(exists pi . p[pi]) & (forall rho . q[rho])", "hyperqptl")
    assert to_prenex(f) == parse("exists pi . forall rho . p[pi] & q[rho]", "hyperqptl")


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 9), st.sampled_from(["hyperqptl", "hqptl+", "h2l"]))
def test_prenex_preserves_bounded_semantics(seed, logic):
    from hyperq.generators import random_sentence
    from hyperq.semantics import EvalParams, evaluate
    from hyperq.verify import small_trace_sets

    rng = random.Random(seed)
    f = random_sentence(rng, logic, max_sets=2, max_pq=1)
    try:
        g = to_prenex(f)
    except PrenexError:
        return
    for T in small_trace_sets()[:4]:
        assert evaluate(T, f, EvalParams.of(1, 1)) == evaluate(T, g, EvalParams.of(1, 1))


def test_corpus_files_have_headers():
    for path in corpus_files():
        with open(path, encoding="utf-8") as fh:
            assert fh.readline().startswith("#logic:"), path


def test_inhabited_hint_unblocks_lemma4_chain():
    from hyperq.reductions import hqptlplus_to_h2l
    from hyperq.semantics import EvalParams, evaluate
    from hyperq.verify import small_trace_sets

    src = parse("forallP q . existsP r . forall pi . G (q[pi] <-> r[pi])", "hqptl+")
    raw = hqptlplus_to_h2l(src, prenex=False)
    with pytest.raises(PrenexError):
        to_prenex(raw)
    g = to_prenex(raw, inhabited=True)
    assert is_prenex(g.root)
    for T in small_trace_sets()[:6]:
        assert evaluate(T, g, EvalParams.of(1, 1)) == evaluate(T, src, EvalParams.of(1, 1))
