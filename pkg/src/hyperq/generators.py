"""Seeded random generators for traces, assignments and formulas."""
from __future__ import annotations

import random

from hyperq.formula import (
    XA, XD, And, ArithQ, Atom, Const, Eq, Eventually, Formula, Globally, Iff, Implies, Less, Logic,
    Member, Next, Not, Or, PAtom, Plus, PropQ, SetQ, Times, TraceQ, Until,
)
from hyperq.semantics import Assignment
from hyperq.traces import LassoTrace

TRACE_VARS = ("pi", "rho", "tau", "pi1")
PROPS = ("p", "q", "r", "a")
SET_VARS = ("X", "Y", "Z")


def rng_of(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_letter(rng, ap):
    return frozenset(p for p in sorted(ap) if rng.random() < 0.5)


def random_lasso(rng, ap, max_stem=3, max_loop=3):
    stem = [random_letter(rng, ap) for _ in range(rng.randint(0, max_stem))]
    loop = [random_letter(rng, ap) for _ in range(rng.randint(1, max_loop))]
    return LassoTrace(ap, stem, loop)


def random_qf(rng, trace_vars, props, depth, unlabeled=(), temporal=True, connectives="full"):
    """Quantifier-free formula over ``p[pi]`` atoms and unlabeled ``q`` atoms."""
    leaves = [("t", v, p) for v in trace_vars for p in props] + [("p", q) for q in unlabeled]

    def leaf():
        k = rng.choice(leaves)
        return Atom(k[2], k[1]) if k[0] == "t" else PAtom(k[1])

    unary = [Not] + ([Next, Eventually, Globally] if temporal else [])
    binary = [Or] + ([And, Implies, Iff] if connectives == "full" else []) + (
        [Until] if temporal and connectives == "full" else [])
    if connectives != "full" and temporal:
        unary = [Not, Next, Eventually]

    def go(d):
        if d == 0 or rng.random() < 0.25:
            return leaf()
        if rng.random() < 0.45:
            return rng.choice(unary)(go(d - 1))
        return rng.choice(binary)(go(d - 1), go(d - 1))

    return go(depth)


def random_assignment(rng, trace_vars, props, unlabeled=(), max_stem=3, max_loop=3):
    ap = frozenset(props)
    return Assignment(
        traces={v: random_lasso(rng, ap, max_stem, max_loop) for v in trace_vars},
        props={q: random_lasso(rng, {q}, max_stem, max_loop) for q in unlabeled})


# -- full ASTs for round-trip fuzzing ------------------------------------------


def random_formula(rng, logic, depth=4):
    logic = Logic(logic)
    if logic == Logic.ARITH:
        return Formula(logic, _random_arith(rng, depth))
    return Formula(logic, _random_temporal(rng, logic, depth))


def _random_temporal(rng, logic, depth):
    def go(d, tvars, pvars, svars):
        r = rng.random()
        if d == 0 or r < 0.15:
            if logic == Logic.HYPERQPTL and pvars and rng.random() < 0.3:
                return PAtom(rng.choice(pvars))
            if tvars:
                return Atom(rng.choice(PROPS), rng.choice(tvars))
            return Const(rng.random() < 0.5)
        r = rng.random()
        if r < 0.3:
            kind = rng.random()
            if logic != Logic.H2L and kind < 0.35:
                q = rng.choice(PROPS)
                return PropQ(rng.random() < 0.5, q, go(d - 1, tvars, pvars + [q], svars))
            if logic == Logic.H2L and kind < 0.35:
                X = rng.choice(SET_VARS)
                return SetQ(rng.random() < 0.5, X, go(d - 1, tvars, pvars, svars + [X]))
            v = rng.choice(TRACE_VARS)
            dom = rng.choice([XA, XD] + svars) if logic == Logic.H2L else None
            return TraceQ(rng.random() < 0.5, v, go(d - 1, tvars + [v], pvars, svars), dom)
        if r < 0.55:
            return rng.choice([Not, Next, Eventually, Globally])(go(d - 1, tvars, pvars, svars))
        op = rng.choice([Or, And, Implies, Iff, Until])
        return op(go(d - 1, tvars, pvars, svars), go(d - 1, tvars, pvars, svars))

    return go(depth, [], [], [])


FIRST = ("x", "y", "z", "w1")
SECOND = ("A", "B", "Y")
THIRD = ("AA", "YY")


def _random_arith(rng, depth):
    def atom(v1, v2, v3):
        kinds = []
        if v1:
            kinds += ["less", "eq", "plus", "times"]
        if v1 and v2:
            kinds.append("mem1")
        if v2 and v3:
            kinds.append("mem2")
        if not kinds:
            return Const(rng.random() < 0.5)
        k = rng.choice(kinds)
        c = rng.choice
        if k == "less":
            return Less(c(v1), c(v1))
        if k == "eq":
            return Eq(c(v1), c(v1))
        if k == "plus":
            return Plus(c(v1), c(v1), c(v1))
        if k == "times":
            return Times(c(v1), c(v1), c(v1))
        if k == "mem1":
            return Member(c(v1), c(v2), 1)
        return Member(c(v2), c(v3), 2)

    def go(d, v1, v2, v3):
        if d == 0 or rng.random() < 0.15:
            return atom(v1, v2, v3)
        r = rng.random()
        if r < 0.35:
            order = rng.choice([1, 1, 2, 3])
            name = rng.choice({1: FIRST, 2: SECOND, 3: THIRD}[order])
            nv = {1: v1, 2: v2, 3: v3}
            nv[order] = nv[order] + [name]
            return ArithQ(rng.random() < 0.5, order, name, go(d - 1, nv[1], nv[2], nv[3]))
        if r < 0.5:
            return Not(go(d - 1, v1, v2, v3))
        op = rng.choice([Or, And, Implies, Iff])
        return op(go(d - 1, v1, v2, v3), go(d - 1, v1, v2, v3))

    return go(depth, [], [], [])


# -- Lemma 1 instances ----------------------------------------------------------


def random_hyp_instance(rng, N=8, k=1):
    """(psi, first, second, families): psi over first- and second-order
    variables plus membership in the outer third-order variables ``YY1..``."""
    outer = [f"YY{j}" for j in range(1, k + 1)]
    free1 = ["z"]
    free2 = ["Z"]
    state = {"so": 0, "fo": 0}

    def atom(v1, v2):
        kinds = ["less", "eq", "plus", "times", "mem1", "mem2"]
        kd = rng.choice(kinds)
        c = rng.choice
        if kd == "less":
            return Less(c(v1), c(v1))
        if kd == "eq":
            return Eq(c(v1), c(v1))
        if kd == "plus":
            return Plus(c(v1), c(v1), c(v1))
        if kd == "times":
            return Times(c(v1), c(v1), c(v1))
        if kd == "mem1":
            return Member(c(v1), c(v2), 1)
        return Member(c(v2), c(outer), 2) if outer else Member(c(v1), c(v2), 1)

    def go(d, v1, v2):
        if d == 0 or rng.random() < 0.2:
            return atom(v1, v2)
        r = rng.random()
        if r < 0.4:
            if state["so"] < 1 and rng.random() < 0.3:
                state["so"] += 1
                name = "Y"
                return ArithQ(rng.random() < 0.5, 2, name, go(d - 1, v1, v2 + [name]))
            if state["fo"] < 2:
                state["fo"] += 1
                name = ("y", "u")[state["fo"] - 1]
                return ArithQ(rng.random() < 0.5, 1, name, go(d - 1, v1 + [name], v2))
        if r < 0.55:
            return Not(go(d - 1, v1, v2))
        op = rng.choice([Or, And, Implies])
        return op(go(d - 1, v1, v2), go(d - 1, v1, v2))

    psi = go(4, list(free1), list(free2))
    first = {"z": rng.randrange(N)}
    second = {"Z": frozenset(i for i in range(N) if rng.random() < 0.4)}
    families = []
    for _ in outer:
        fam = {frozenset(i for i in range(N) if rng.random() < 0.3) for _ in range(rng.randint(0, 6))}
        if rng.random() < 0.5:
            fam.add(second["Z"])
        families.append(fam)
    return Formula(Logic.ARITH, psi), first, second, dict(zip(outer, families))


__all__ = [
    "random_letter", "random_lasso", "random_qf", "random_assignment", "random_formula",
    "random_hyp_instance", "random_sentence", "rng_of",
]


def random_sentence(rng, logic, props=("p",), depth=4, max_sets=1, max_pq=2):
    """Small sentence of ``logic`` mixing quantifiers and temporal operators."""
    logic = Logic(logic)
    budget = {"sets": max_sets, "pq": max_pq, "tv": 0}

    def qf(tvars, pvars, d):
        leaves = [Atom(p, v) for v in tvars for p in list(props) + (pvars if logic != Logic.HYPERQPTL else [])]
        if logic == Logic.HYPERQPTL:
            leaves += [PAtom(q) for q in pvars]
        if not leaves:
            return Const(rng.random() < 0.5)

        def go(k):
            if k == 0 or rng.random() < 0.3:
                return rng.choice(leaves)
            r = rng.random()
            if r < 0.4:
                return rng.choice([Not, Next, Eventually, Globally])(go(k - 1))
            return rng.choice([Or, And, Implies, Iff, Until])(go(k - 1), go(k - 1))

        return go(d)

    def go(d, tvars, pvars, svars):
        if d == 0 or (tvars and rng.random() < 0.25):
            return qf(tvars, pvars, 2)
        r = rng.random()
        if r < 0.2 and tvars:
            op = rng.choice([And, Or, Implies])
            return op(go(d - 1, tvars, pvars, svars), go(d - 1, tvars, pvars, svars))
        if r < 0.3 and tvars:
            return rng.choice([Not, Next, Eventually, Globally])(go(d - 1, tvars, pvars, svars))
        if r < 0.5 and logic == Logic.H2L and budget["sets"]:
            budget["sets"] -= 1
            X = f"X{budget['sets'] + 1}"
            return SetQ(rng.random() < 0.5, X, go(d - 1, tvars, pvars, svars + [X]))
        if r < 0.5 and logic != Logic.H2L and budget["pq"]:
            budget["pq"] -= 1
            q = f"q{budget['pq'] + 1}"
            return PropQ(rng.random() < 0.5, q, go(d - 1, tvars, pvars + [q], svars))
        budget["tv"] += 1
        v = f"pi{budget['tv']}"
        dom = rng.choice([XA, XD, XD] + svars * 2) if logic == Logic.H2L else None
        return TraceQ(rng.random() < 0.5, v, go(d - 1, tvars + [v], pvars, svars), dom)

    return Formula(logic, go(depth, [], [], []))
