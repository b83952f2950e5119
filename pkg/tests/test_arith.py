import itertools
import random

import pytest
from hypothesis import given, strategies as st

from hyperq.arith import (
    ArithAssignment, ArithError, BoundedDomain, cantor_pair, cantor_unpair, decode_trace,
    encode_trace, eval_arith, is_sigma21, prefix_of,
)
from hyperq.formula import size
from hyperq.generators import random_formula, random_lasso
from hyperq.reductions import build_theta_eq_n
from hyperq.syntax import parse


def A(text):
    return parse(text, "arith")


def test_pairing_grid_bijective():
    seen = {}
    for i, j in itertools.product(range(64), repeat=2):
        n = cantor_pair(i, j)
        assert cantor_unpair(n) == (i, j)
        assert n not in seen
        seen[n] = (i, j)
    # the first triangular block is covered exactly
    assert set(range(64 * 65 // 2)) <= set(seen)


@given(st.integers(0, 2 ** 30), st.integers(0, 2 ** 30))
def test_pairing_large(i, j):
    assert cantor_unpair(cantor_pair(i, j)) == (i, j)


def test_pairing_domain_errors():
    with pytest.raises(ValueError):
        cantor_pair(-1, 0)
    with pytest.raises(OverflowError):
        cantor_pair(2 ** 40, 2 ** 40)


def test_trace_encoding_round_trip():
    rng = random.Random(2)
    index = {"p": 0, "a": 1}
    for _ in range(200):
        t = random_lasso(rng, frozenset(index), 4, 3)
        for h in (1, 5, 11):
            assert decode_trace(encode_trace(t, index, h), index, h) == prefix_of(t, h)


def test_encoding_rejects_non_injective_index():
    t = random_lasso(random.Random(0), frozenset({"p", "a"}))
    with pytest.raises(ValueError):
        encode_trace(t, {"p": 0, "a": 0}, 3)


def _brute(node, N, env):
    """Independent evaluator over 0..N-1 and subsets as frozensets (orders 1, 2)."""
    from hyperq.formula import And, ArithQ, Const, Eq, Iff, Implies, Less, Member, Not, Or, Plus, Times

    n = node
    if isinstance(n, Const):
        return n.value
    if isinstance(n, Less):
        return env[n.left] < env[n.right]
    if isinstance(n, Eq):
        return env[n.left] == env[n.right]
    if isinstance(n, Plus):
        return env[n.a] + env[n.b] == env[n.c]
    if isinstance(n, Times):
        return env[n.a] * env[n.b] == env[n.c]
    if isinstance(n, Member):
        return env[n.elem] in env[n.container]
    if isinstance(n, Not):
        return not _brute(n.arg, N, env)
    if isinstance(n, (Or, And, Implies, Iff)):
        l, r = _brute(n.left, N, env), _brute(n.right, N, env)
        return {Or: l or r, And: l and r, Implies: (not l) or r, Iff: l == r}[type(n)]
    if isinstance(n, ArithQ):
        if n.order == 1:
            dom = range(N)
        elif n.order == 2:
            dom = [frozenset(c) for k in range(N + 1) for c in itertools.combinations(range(N), k)]
        else:
            subsets = [frozenset(c) for k in range(N + 1) for c in itertools.combinations(range(N), k)]
            dom = [frozenset(c) for k in range(len(subsets) + 1) for c in itertools.combinations(subsets, k)]
        vals = (_brute(n.body, N, {**env, n.var: v}) for v in dom)
        return any(vals) if n.exists else all(vals)
    raise TypeError(n)


def test_eval_arith_matches_brute_force():
    rng = random.Random(4)
    checked = 0
    for _ in range(400):
        f = random_formula(rng, "arith", 5)
        from hyperq.formula import arith_free_vars

        if arith_free_vars(f.root):
            continue
        N = rng.choice([2, 3])
        assert eval_arith(f, BoundedDomain(N)) == _brute(f.root, N, {}), str(f)
        checked += 1
    assert checked > 100


@pytest.mark.parametrize("text,N,want", [
    ("exists1 y . y + y = y", 3, True),
    ("forall1 x . exists1 y . x < y", 4, False),
    ("exists2 Y . forall1 y . y in Y", 3, True),
    ("forall2 Y . exists1 y . y in Y", 3, False),
    ("exists3 YY . forall2 Y . Y in YY", 2, True),
    ("exists1 y . y * y = y & exists1 z . z < y", 3, True),
])
def test_small_sentences(text, N, want):
    assert eval_arith(A(text), BoundedDomain(N)) is want


def test_sums_are_exact_not_modular():
    # y = 2 has no double inside {0, 1, 2}; a wrapping sum would find one
    assert not eval_arith(A("forall1 y . exists1 z . y + y = z"), BoundedDomain(3))


def test_assignment_and_errors():
    f = A("y in Y")
    assert eval_arith(f, BoundedDomain(4), ArithAssignment({"y": 2}, {"Y": {2, 3}}))
    assert not eval_arith(f, BoundedDomain(4), ArithAssignment({"y": 1}, {"Y": {2, 3}}))
    with pytest.raises(ArithError):
        eval_arith(f, BoundedDomain(4))
    with pytest.raises(ArithError):
        eval_arith(f, BoundedDomain(2), ArithAssignment({"y": 1}, {"Y": {5}}))
    with pytest.raises(ArithError):
        eval_arith(A("exists3 YY . true"), BoundedDomain(6))


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 6, 7])
def test_theta_eq_n_defines_n(n):
    f = build_theta_eq_n(n)
    for v in range(8):
        assert eval_arith(f, BoundedDomain(8), ArithAssignment({"x": v})) == (v == n)


def test_theta_eq_n_size_is_logarithmic():
    sizes = [size(build_theta_eq_n(2 ** k).root) for k in range(2, 12)]
    # doubling n adds a constant amount
    steps = {b - a for a, b in zip(sizes, sizes[1:])}
    assert len(steps) == 1


def test_sigma21_shape():
    assert is_sigma21(A("exists3 YY . exists3 AA . forall2 Y . Y in YY"))
    assert not is_sigma21(A("forall3 YY . true"))
    assert not is_sigma21(A("exists2 Y . exists3 YY . Y in YY"))
