"""Slow reference evaluator that follows the quantifier definitions literally.

Every quantifier enumerates its whole bounded domain and every temporal
operator inspects positions one by one.  Intended for tiny instances only.
"""
from __future__ import annotations

import itertools
import math

from hyperq.formula import (
    XA, XD, And, Atom, AxiomPlusTimes, Const, Eventually, Formula, Globally, Iff, Implies, Logic,
    Next, Not, Or, PAtom, PropQ, SetQ, TraceQ, Until, propositions, walk,
)
from hyperq.semantics import PT_PROPS, EvalParams, EvaluationError, eval_axiom_plus_times
from hyperq.traces import CapExceeded, LassoTrace, TraceSet, enumerate_universe, get_cap


def _restrict(t, ap):
    return LassoTrace(ap, [s & ap for s in t.stem], [s & ap for s in t.loop])


def _relabel(t, q, row):
    """``t`` with the q-row replaced by ``row``."""
    S = max(len(t.stem), len(row.stem))
    L = math.lcm(len(t.loop), len(row.loop))
    word = []
    for i in range(S + L):
        letter = t.value_at(i) - {q}
        if q in row.value_at(i):
            letter = letter | {q}
        word.append(letter)
    return LassoTrace(t.ap, word[:S], word[S:])


def oracle_eval(T, f, params=EvalParams()):
    root = f.root
    logic = f.logic
    ap = frozenset(propositions(root))
    if any(isinstance(n, AxiomPlusTimes) for n in walk(root)):
        ap |= frozenset(PT_PROPS)
    cap = get_cap(params.cap)
    T0 = frozenset(_restrict(t, ap) for t in T.members)
    rows = {}
    universe = []

    def rows_of(q):
        if q not in rows:
            rows[q] = enumerate_universe({q}, params.universe, cap).sorted()
        return rows[q]

    needs_universe = logic == Logic.H2L and any(
        isinstance(n, SetQ) or (isinstance(n, TraceQ) and n.domain == XA) for n in walk(root))
    if needs_universe:
        universe = enumerate_universe(ap, params.universe, cap).sorted()
    lassos = list(T0) + list(universe)
    for n in walk(root):
        if isinstance(n, PropQ):
            lassos.extend(rows_of(n.prop))
    if any(isinstance(n, AxiomPlusTimes) for n in walk(root)):
        lassos.append(LassoTrace((), [()] * params.universe.stem_bound, [()]))
    S = max((len(t.stem) for t in lassos), default=0)
    L = 1
    for t in lassos:
        L = math.lcm(L, len(t.loop))
    memo = {}

    def norm(j):
        return j if j < S + L else S + (j - S) % L

    def window(j):
        return range(j, max(j, S) + L)

    def ev(n, j, env, Tc, sets):
        j = norm(j)
        key = (id(n), j, tuple(sorted(env.items())), Tc, tuple(sorted(sets.items())))
        if key in memo:
            return memo[key]
        r = _ev(n, j, env, Tc, sets)
        memo[key] = r
        return r

    def _ev(n, j, env, Tc, sets):
        if isinstance(n, Const):
            return n.value
        if isinstance(n, Atom):
            return n.prop in env[n.var].value_at(j)
        if isinstance(n, PAtom):
            return all(n.prop in t.value_at(j) for t in Tc)
        if isinstance(n, AxiomPlusTimes):
            return eval_axiom_plus_times(TraceSet(ap, Tc), params)
        if isinstance(n, Not):
            return not ev(n.arg, j, env, Tc, sets)
        if isinstance(n, Or):
            return ev(n.left, j, env, Tc, sets) or ev(n.right, j, env, Tc, sets)
        if isinstance(n, And):
            return ev(n.left, j, env, Tc, sets) and ev(n.right, j, env, Tc, sets)
        if isinstance(n, Implies):
            return (not ev(n.left, j, env, Tc, sets)) or ev(n.right, j, env, Tc, sets)
        if isinstance(n, Iff):
            return ev(n.left, j, env, Tc, sets) == ev(n.right, j, env, Tc, sets)
        if isinstance(n, Next):
            return ev(n.arg, j + 1, env, Tc, sets)
        if isinstance(n, Eventually):
            return any(ev(n.arg, k, env, Tc, sets) for k in window(j))
        if isinstance(n, Globally):
            return all(ev(n.arg, k, env, Tc, sets) for k in window(j))
        if isinstance(n, Until):
            for k in window(j):
                if ev(n.right, k, env, Tc, sets):
                    return True
                if not ev(n.left, k, env, Tc, sets):
                    return False
            return False
        if isinstance(n, TraceQ):
            if n.domain is None or n.domain == XD:
                dom = Tc if logic != Logic.H2L else T0
            elif n.domain == XA:
                dom = universe
            else:
                dom = sets[n.domain]
            pick = any if n.exists else all
            return pick(ev(n.body, j, {**env, n.var: t}, Tc, sets) for t in sorted(dom, key=LassoTrace.sort_key))
        if isinstance(n, PropQ):
            pick = any if n.exists else all
            if logic == Logic.HYPERQPTL:
                return pick(ev(n.body, j, env, frozenset(_relabel(t, n.prop, r) for t in Tc), sets)
                            for r in rows_of(n.prop))
            return pick(ev(n.body, j, env, T2, sets) for T2 in _relabelings(Tc, n.prop, rows_of(n.prop), cap))
        if isinstance(n, SetQ):
            if 2 ** len(universe) > cap:
                raise CapExceeded(f"2^{len(universe)} subsets exceed cap {cap}")
            pick = any if n.exists else all
            subsets = (frozenset(c) for k in range(len(universe) + 1)
                       for c in itertools.combinations(universe, k))
            return pick(ev(n.body, j, env, Tc, {**sets, n.var: s}) for s in subsets)
        raise EvaluationError(f"unexpected node {type(n).__name__}")

    sets = {}
    return ev(root, 0, {}, T0, sets)


def _relabelings(Tc, q, rows, cap):
    """Every T' equal to Tc except on q: each projection class gets a nonempty set of q-rows."""
    classes = sorted({_relabel(t, q, LassoTrace({q}, [], [()])) for t in Tc}, key=LassoTrace.sort_key)
    choices = [s for k in range(1, len(rows) + 1) for s in itertools.combinations(rows, k)]
    if len(choices) ** len(classes) > cap:
        raise CapExceeded(f"{len(choices)}^{len(classes)} relabelings exceed cap {cap}")
    for combo in itertools.product(choices, repeat=len(classes)):
        yield frozenset(_relabel(c, q, r) for c, rs in zip(classes, combo) for r in rs)


def oracle(T, f, params=EvalParams()):
    if not isinstance(f, Formula):
        raise TypeError("expected a Formula")
    return oracle_eval(T, f, params)


__all__ = ["oracle", "oracle_eval"]
