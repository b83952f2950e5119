"""Bounded evaluators for HyperQPTL, HyperQPTL+ and Hyper2LTL over lasso traces.

Trace quantifiers range over the model exactly.  Propositional quantifiers
range over bounded rows ``enumerate_universe({q}, params)`` and set quantifiers
over subsets of the bounded universe.  Everything else is exact for
ultimately periodic words.

Evaluation works on one global lasso structure: ``S`` is the largest stem of
any trace the evaluator can see (model, bounded rows, bounded universe) and
``L`` the lcm of all loops.  A subformula's value is an int whose bit ``i`` is
its truth at position ``i < S + L``; position ``S+L-1`` is followed by ``S``.
Traces become tuples of per-proposition bitmasks over this structure, and only
propositions that occur in the formula are kept (the others cannot influence
the verdict).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from hyperq import kernel
from hyperq.formula import (
    XA, XD, And, Atom, AxiomPlusTimes, Const, Eventually, Formula, Globally, Iff, Implies,
    Logic, Next, Not, Or, PAtom, PropQ, SetQ, TraceQ, Until, check_sentence, children, free_vars,
    is_quantifier_free, propositions, rebuild, walk,
)
from hyperq.traces import (
    AlphabetError, CapExceeded, LassoTrace, TraceSet, UniverseParams, enumerate_universe,
    get_cap,
)

PT_PROPS = ("arg1", "arg2", "res", "add", "mult")


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class EvalParams:
    universe: UniverseParams = UniverseParams()
    ap: frozenset | None = None
    cap: int | None = None

    @staticmethod
    def of(stem_bound=0, loop_bound=1, ap=None, cap=None):
        return EvalParams(UniverseParams(stem_bound, loop_bound),
                          None if ap is None else frozenset(ap), cap)


@dataclass
class Assignment:
    """Trace part, propositional part (rows over ``{q}``) and set part."""

    traces: dict = field(default_factory=dict)
    props: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)

    def __post_init__(self):
        for q, row in self.props.items():
            if row.ap != frozenset([q]):
                raise AlphabetError(f"row for {q!r} must be over {{{q}}}")


# -- T_(+,*) ----------------------------------------------------------------


def t_plus_times_member(t):
    """Whether ``t`` is in T_(+,*): unique arg1/arg2/res positions, and either
    add everywhere (mult nowhere) with n1+n2=n3, or the same with mult and *."""
    missing = set(PT_PROPS) - t.ap
    if missing:
        raise AlphabetError(f"trace lacks {sorted(missing)}")
    for p in PT_PROPS[:3]:
        if any(p in s for s in t.loop):
            return False
    pos = []
    for p in PT_PROPS[:3]:
        hits = [i for i, s in enumerate(t.stem) if p in s]
        if len(hits) != 1:
            return False
        pos.append(hits[0])
    n1, n2, n3 = pos
    letters = t.stem + t.loop
    add_all = all("add" in s for s in letters)
    add_none = not any("add" in s for s in letters)
    mult_all = all("mult" in s for s in letters)
    mult_none = not any("mult" in s for s in letters)
    if add_all and mult_none:
        return n1 + n2 == n3
    if mult_all and add_none:
        return n1 * n2 == n3
    return False


def plus_times_trace(n1, n2, n3, op, ap=PT_PROPS):
    """The T_(+,*) trace with the given positions; ``op`` is "add" or "mult"."""
    m = max(n1, n2, n3) + 1
    stem = [{op} for _ in range(m)]
    stem[n1].add("arg1")
    stem[n2].add("arg2")
    stem[n3].add("res")
    return LassoTrace(ap, stem, [{op}])


def bounded_plus_times(stem_bound):
    """All T_(+,*) members whose stem fits ``stem_bound``."""
    out = []
    for a in range(stem_bound):
        for b in range(stem_bound):
            if a + b < stem_bound:
                out.append(plus_times_trace(a, b, a + b, "add"))
            if a * b < stem_bound:
                out.append(plus_times_trace(a, b, a * b, "mult"))
    return TraceSet(PT_PROPS, out)


def eval_axiom_plus_times(T, params=EvalParams()):
    """Semantic stand-in for the T_(+,*) axiom: T's projection on the five
    arithmetic props equals the set of bounded T_(+,*) members."""
    missing = set(PT_PROPS) - T.ap
    if missing:
        raise AlphabetError(f"trace set lacks {sorted(missing)}")
    want = bounded_plus_times(params.universe.stem_bound).members
    return T.project(PT_PROPS).members == want


# -- quantifier-free evaluation ----------------------------------------------

_programs = {}


def _program(node):
    prog = _programs.get(node)
    if prog is None:
        prog = kernel.compile_qf(node)
        if len(_programs) > 4096:
            _programs.clear()
        _programs[node] = prog
    return prog


def _local_structure(lassos):
    S = max((len(t.stem) for t in lassos), default=0)
    L = 1
    for t in lassos:
        L = math.lcm(L, len(t.loop))
    return S, L


def _leaf_trace(a, key):
    if key[0] == "t":
        if key[1] not in a.traces:
            raise EvaluationError(f"unbound trace variable {key[1]!r}")
        return a.traces[key[1]]
    if key[0] == "p":
        if key[1] not in a.props:
            raise EvaluationError(f"unbound proposition {key[1]!r}")
        return a.props[key[1]]
    raise EvaluationError("AXIOM_PLUS_TIMES needs a trace set; use a full evaluator")


def eval_qf(a, i, psi):
    """Truth of quantifier-free ``psi`` at position ``i`` under assignment ``a``."""
    root = psi.root if isinstance(psi, Formula) else psi
    if not is_quantifier_free(root):
        raise EvaluationError("eval_qf needs a quantifier-free formula")
    prog = _program(root)
    lassos = [_leaf_trace(a, k) for k in prog.leaves]
    S, L = _local_structure(lassos)
    n = S + L
    atoms = []
    for key, t in zip(prog.leaves, lassos):
        prop = key[2] if key[0] == "t" else key[1]
        atoms.append(t.masks((prop,), S, n)[0])
    if i >= n:
        i = S + (i - S) % L
    return bool((prog.run(atoms, S, n) >> i) & 1)


def qf_masks(a, psi):
    """(S, L, value mask) of quantifier-free ``psi`` under ``a``."""
    root = psi.root if isinstance(psi, Formula) else psi
    prog = _program(root)
    lassos = [_leaf_trace(a, k) for k in prog.leaves]
    S, L = _local_structure(lassos)
    atoms = [t.masks((k[2] if k[0] == "t" else k[1],), S, S + L)[0] for k, t in zip(prog.leaves, lassos)]
    return S, L, prog.run(atoms, S, S + L)


def eval_qf_reference(a, i, psi):
    """Direct recursive evaluation on the infinite words (test oracle).

    Uses only ``value_at``: F/G/U look at positions ``j`` in
    ``[i, max(i, S) + L)``, which covers every position class.
    """
    root = psi.root if isinstance(psi, Formula) else psi
    lassos = []
    for n in walk(root):
        if isinstance(n, Atom):
            lassos.append(_leaf_trace(a, ("t", n.var, n.prop)))
        elif isinstance(n, PAtom):
            lassos.append(_leaf_trace(a, ("p", n.prop)))
    S, L = _local_structure(lassos)
    memo = {}

    def ev(n, j):
        key = (id(n), j)
        if key in memo:
            return memo[key]
        if isinstance(n, Const):
            r = n.value
        elif isinstance(n, Atom):
            r = n.prop in a.traces[n.var].value_at(j)
        elif isinstance(n, PAtom):
            r = n.prop in a.props[n.prop].value_at(j)
        elif isinstance(n, Not):
            r = not ev(n.arg, j)
        elif isinstance(n, Or):
            r = ev(n.left, j) or ev(n.right, j)
        elif isinstance(n, And):
            r = ev(n.left, j) and ev(n.right, j)
        elif isinstance(n, Implies):
            r = (not ev(n.left, j)) or ev(n.right, j)
        elif isinstance(n, Iff):
            r = ev(n.left, j) == ev(n.right, j)
        elif isinstance(n, Next):
            r = ev(n.arg, j + 1)
        elif isinstance(n, Eventually):
            r = any(ev(n.arg, k) for k in range(j, max(j, S) + L))
        elif isinstance(n, Globally):
            r = all(ev(n.arg, k) for k in range(j, max(j, S) + L))
        elif isinstance(n, Until):
            r = False
            for k in range(j, max(j, S) + L):
                if ev(n.right, k):
                    r = True
                    break
                if not ev(n.left, k):
                    break
        else:
            raise EvaluationError(f"not quantifier-free: {type(n).__name__}")
        memo[key] = r
        return r

    return ev(root, i)


# -- miniscoping ------------------------------------------------------------


def _maybe_empty(q, logic):
    return isinstance(q, TraceQ) and logic == Logic.H2L and q.domain not in (XA, XD)


def _occurs(q, n, info):
    if isinstance(q, TraceQ):
        return q.var in info.fv_trace(n)
    if isinstance(q, PropQ):
        return q.prop in info.props(n)
    return q.var in info.fv_sets(n)


def _with_body(q, body, exists=None):
    e = q.exists if exists is None else exists
    if isinstance(q, TraceQ):
        return TraceQ(e, q.var, body, q.domain)
    if isinstance(q, PropQ):
        return PropQ(e, q.prop, body)
    return SetQ(e, q.var, body)


class _Info:
    """Cached syntactic facts per node object."""

    def __init__(self):
        self._fvt, self._fvs, self._props = {}, {}, {}

    def fv_trace(self, n):
        k = id(n)
        r = self._fvt.get(k)
        if r is None:
            if isinstance(n, Atom):
                r = frozenset([n.var])
            elif isinstance(n, TraceQ):
                r = self.fv_trace(n.body) - {n.var}
            else:
                r = frozenset().union(*(self.fv_trace(c) for c in children(n)))
            self._fvt[k] = (r, n)
            return r
        return r[0]

    def fv_sets(self, n):
        k = id(n)
        r = self._fvs.get(k)
        if r is None:
            if isinstance(n, TraceQ):
                r = self.fv_sets(n.body) | ({n.domain} if n.domain else frozenset())
            elif isinstance(n, SetQ):
                r = self.fv_sets(n.body) - {n.var}
            else:
                r = frozenset().union(*(self.fv_sets(c) for c in children(n)))
            self._fvs[k] = (r, n)
            return r
        return r[0]

    def props(self, n):
        k = id(n)
        r = self._props.get(k)
        if r is None:
            r = frozenset(propositions(n))
            if any(isinstance(m, AxiomPlusTimes) for m in walk(n)):
                r |= frozenset(PT_PROPS)
            self._props[k] = (r, n)
            return r
        return r[0]


def miniscope(root, logic, info=None):
    """Push quantifiers inward across Boolean connectives.

    Rules applied only where they preserve the bounded semantics: a quantifier
    moves into the one side that mentions its variable (for possibly empty
    Hyper2LTL domains only ``exists`` over ``&`` and ``forall`` over ``|``),
    ``forall`` distributes over ``&`` and ``exists`` over ``|``, and a vacuous
    quantifier over a nonempty domain is dropped.
    """
    info = info or _Info()
    logic = Logic(logic)

    def can_push(q, conj):
        if not _maybe_empty(q, logic):
            return True
        return q.exists == conj

    def push(q, b):
        if not _occurs(q, b, info) and not _maybe_empty(q, logic):
            return b
        if isinstance(b, Not):
            return Not(push(_with_body(q, Const(True), not q.exists), b.arg))
        if isinstance(b, (And, Or)):
            conj = isinstance(b, And)
            lo, ro = _occurs(q, b.left, info), _occurs(q, b.right, info)
            distributes = q.exists != conj
            if not lo and can_push(q, conj) and ro:
                return type(b)(b.left, push(q, b.right))
            if not ro and can_push(q, conj) and lo:
                return type(b)(push(q, b.left), b.right)
            if distributes:
                return type(b)(push(q, b.left), push(q, b.right))
            return _with_body(q, b)
        if isinstance(b, Implies):
            lo, ro = _occurs(q, b.left, info), _occurs(q, b.right, info)
            flip = _with_body(q, Const(True), not q.exists)
            if not lo and ro and can_push(q, False):
                return Implies(b.left, push(q, b.right))
            if not ro and lo and can_push(q, False):
                return Implies(push(flip, b.left), b.right)
            if q.exists:
                return Implies(push(flip, b.left), push(q, b.right))
            return _with_body(q, b)
        return _with_body(q, b)

    def ms(n):
        if isinstance(n, (TraceQ, PropQ, SetQ)):
            return push(n, ms(n.body))
        kids = children(n)
        if not kids or is_quantifier_free(n):
            return n
        return rebuild(n, [ms(k) for k in kids])

    out = ms(root)
    if logic != Logic.H2L:
        return out
    for _ in range(4):
        nxt = drop_vacuous(out, info)
        if nxt == out:
            break
        out = ms(nxt)
    return out


def _when_empty(n, X, info):
    """Truth value of ``n`` under any assignment in which set ``X`` is empty
    (``None`` if not determined syntactically)."""
    if isinstance(n, Const):
        return n.value
    if isinstance(n, TraceQ):
        if n.domain == X:
            return not n.exists
        v = _when_empty(n.body, X, info)
        if v is None:
            return None
        if n.domain in (XA, XD) or v == (not n.exists):
            return v
        return None
    if isinstance(n, (PropQ, SetQ)):
        return None if isinstance(n, SetQ) and n.var == X else _when_empty(n.body, X, info)
    if isinstance(n, Not):
        v = _when_empty(n.arg, X, info)
        return None if v is None else not v
    if isinstance(n, (And, Or, Implies)):
        l, r = _when_empty(n.left, X, info), _when_empty(n.right, X, info)
        if isinstance(n, Implies):
            l = None if l is None else not l
        if isinstance(n, And):
            return False if False in (l, r) else (True if l is True and r is True else None)
        return True if True in (l, r) else (False if l is False and r is False else None)
    return None


def drop_vacuous(root, info):
    """Remove Hyper2LTL trace quantifiers whose variable is unused, when that is
    sound: the domain is known nonempty at that point (it is Xa/Xd or some
    enclosing quantifier ranges over it), or the body already takes the value
    the quantifier would take over an empty domain."""

    def go(n, nonempty):
        if isinstance(n, TraceQ):
            body = go(n.body, nonempty | {n.domain})
            if n.var not in info.fv_trace(body):
                if n.domain in nonempty or n.domain in (XA, XD):
                    return body
                if _when_empty(body, n.domain, info) == (not n.exists):
                    return body
            return TraceQ(n.exists, n.var, body, n.domain)
        if isinstance(n, SetQ):
            body = go(n.body, nonempty - {n.var})
            if n.var not in info.fv_sets(body):
                return body
            if _only_vacuous(body, n.var):
                # the body only asks whether the set is empty; both cases exist
                empty, full = _emptiness_cases(body, n.var)
                return Or(empty, full) if n.exists else And(empty, full)
            return SetQ(n.exists, n.var, body)
        kids = children(n)
        if not kids or is_quantifier_free(n):
            return n
        return rebuild(n, [go(k, nonempty) for k in kids])

    return go(root, frozenset())


def _only_vacuous(n, X):
    for m in walk(n):
        if isinstance(m, TraceQ) and m.domain == X:
            if any(isinstance(a, Atom) and a.var == m.var for a in walk(m.body)):
                return False
    return True


def _emptiness_cases(n, X):
    def sub(m, empty):
        if isinstance(m, TraceQ) and m.domain == X:
            return Const(not m.exists) if empty else sub(m.body, empty)
        kids = children(m)
        if not kids:
            return m
        return rebuild(m, [sub(k, empty) for k in kids])

    return sub(n, True), sub(n, False)


# -- the bounded evaluator ---------------------------------------------------


def _conjuncts(n):
    if isinstance(n, And):
        return _conjuncts(n.left) + _conjuncts(n.right)
    return [n]


def _guard_part(q):
    """Conjuncts that every witness must satisfy (exists) / antecedent (forall)."""
    if q.exists:
        return _conjuncts(q.body)
    if isinstance(q.body, Implies):
        return _conjuncts(q.body.left)
    out = []
    for d in _disjuncts(q.body):
        if isinstance(d, Not):
            out.extend(_conjuncts(d.arg))
    return out


def _disjuncts(n):
    if isinstance(n, Or):
        return _disjuncts(n.left) + _disjuncts(n.right)
    return [n]


class _Evaluator:
    def __init__(self, logic, root, T, params, assignment=None):
        self.assignment = assignment or Assignment()
        self.logic = Logic(logic)
        self.params = params
        self.cap = get_cap(params.cap)
        self.info = _Info()
        root = miniscope(root, self.logic, self.info)
        self.root = root
        props = set(self.info.props(root))
        self.props = tuple(sorted(props))
        self.index = {p: k for k, p in enumerate(self.props)}
        u = params.universe
        self.has_axiom = any(isinstance(n, AxiomPlusTimes) for n in walk(root))
        bounded = any(isinstance(n, (PropQ, SetQ)) for n in walk(root)) or self.has_axiom or any(
            isinstance(n, TraceQ) and n.domain == XA for n in walk(root))
        lassos = [t for t in T.members] + list(self.assignment.traces.values())
        for members in self.assignment.sets.values():
            lassos.extend(members)
        S = max((len(t.stem) for t in lassos), default=0)
        L = 1
        for t in lassos:
            L = math.lcm(L, len(t.loop))
        if bounded:
            S = max(S, u.stem_bound)
            for k in range(1, u.loop_bound + 1):
                L = math.lcm(L, k)
        self.S, self.L, self.n = S, L, S + L
        self.full = (1 << self.n) - 1
        self.T0 = frozenset(self._encode(t) for t in lassos)
        self._rows = {}
        self._universe = None
        self._ids = {}
        self.memo = {}
        self._guards = {}
        self._qf = {}
        self._axiom = {}
        self._pt_members = None
        self._nodes = {}

    # -- encoding helpers
    def _encode(self, t):
        out = []
        for p in self.props:
            m = 0
            if p in t.ap:
                for i in range(self.n):
                    if p in t.value_at(i):
                        m |= 1 << i
            out.append(m)
        return tuple(out)

    def rows(self, q):
        r = self._rows.get(q)
        if r is None:
            r = [self._encode_row(t, q) for t in enumerate_universe({q}, self.params.universe, self.cap).sorted()]
            self._rows[q] = r
        return r

    def _encode_row(self, t, q):
        m = 0
        for i in range(self.n):
            if q in t.value_at(i):
                m |= 1 << i
        return m

    def universe(self):
        if self._universe is None:
            U = enumerate_universe(self.props, self.params.universe, self.cap)
            self._universe = tuple(self._encode(t) for t in U.sorted())
        return self._universe

    def sid(self, s):
        k = self._ids.get(s)
        if k is None:
            k = len(self._ids)
            self._ids[s] = k
        return k

    # -- leaves
    def unlabeled(self, q, T):
        k = self.index[q]
        m = self.full
        for t in T:
            m &= t[k]
        return m

    def axiom(self, T):
        key = self.sid(T)
        v = self._axiom.get(key)
        if v is None:
            if self._pt_members is None:
                want = bounded_plus_times(self.params.universe.stem_bound)
                idx = [self.index[p] for p in PT_PROPS]
                self._pt_idx = idx
                enc = []
                for t in want.members:
                    enc.append(tuple(self._encode_row(t, p) for p in PT_PROPS))
                self._pt_members = frozenset(enc)
            got = frozenset(tuple(t[k] for k in self._pt_idx) for t in T)
            v = self.full if got == self._pt_members else 0
            self._axiom[key] = v
        return v

    def run_qf(self, node, env, T):
        prog = self._qf.get(id(node))
        if prog is None:
            prog = kernel.compile_qf(node)
            self._qf[id(node)] = prog
        atoms = []
        for key in prog.leaves:
            if key[0] == "t":
                t = env.get(key[1])
                if t is None:
                    raise EvaluationError(f"unbound trace variable {key[1]!r}")
                atoms.append(t[self.index[key[2]]])
            elif key[0] == "p":
                atoms.append(self.unlabeled(key[1], T))
            else:
                atoms.append(self.axiom(T))
        return prog.run(atoms, self.S, self.n)

    # -- need propagation
    def need_next(self, need):
        r = (need << 1) & self.full
        if (need >> (self.n - 1)) & 1:
            r |= 1 << self.S
        return r

    def need_future(self, need):
        if not need:
            return 0
        low = (need & -need).bit_length() - 1
        loop = self.full ^ ((1 << self.S) - 1)
        return (self.full ^ ((1 << low) - 1)) | loop

    # -- main recursion
    def node_info(self, n):
        """(is quantifier-free, sorted free trace vars, depends on T, sorted free set vars)."""
        k = id(n)
        v = self._nodes.get(k)
        if v is None:
            dep = any(isinstance(m, (PAtom, AxiomPlusTimes, PropQ)) or (isinstance(m, TraceQ) and m.domain is None)
                      for m in walk(n))
            v = (is_quantifier_free(n), tuple(sorted(self.info.fv_trace(n))), dep,
                 tuple(sorted(self.info.fv_sets(n))), n)
            self._nodes[k] = v
        return v

    def value(self, n, env, T, sets, need):
        qf, fvt, dep, fvs, _ = self.node_info(n)
        if qf:
            return self.run_qf(n, env, T)
        key = (id(n), tuple([env[v] for v in fvt]), self.sid(T) if dep else -1,
               tuple([self.sid(sets[x]) for x in fvs]))
        hit = self.memo.get(key)
        if hit is not None and (hit[1] & need) == need:
            return hit[0]
        v = self._value(n, env, T, sets, need)
        if hit is not None and hit[0] == v:
            need |= hit[1]
        self.memo[key] = (v, need)
        return v

    def _value(self, n, env, T, sets, need):
        full = self.full
        if isinstance(n, Not):
            return full ^ self.value(n.arg, env, T, sets, need)
        if isinstance(n, And):
            l = self.value(n.left, env, T, sets, need)
            nn = need & l
            if not nn:
                return l
            return l & self.value(n.right, env, T, sets, nn)
        if isinstance(n, Or):
            l = self.value(n.left, env, T, sets, need)
            nn = need & ~l
            if not nn:
                return l
            return l | self.value(n.right, env, T, sets, nn)
        if isinstance(n, Implies):
            l = self.value(n.left, env, T, sets, need)
            nn = need & l
            if not nn:
                return full ^ l
            return (full ^ l) | self.value(n.right, env, T, sets, nn)
        if isinstance(n, Iff):
            l = self.value(n.left, env, T, sets, need)
            r = self.value(n.right, env, T, sets, need)
            return full ^ (l ^ r)
        if isinstance(n, Next):
            return kernel.op_next(self.value(n.arg, env, T, sets, self.need_next(need)), self.S, self.n)
        if isinstance(n, Eventually):
            return kernel.op_eventually(self.value(n.arg, env, T, sets, self.need_future(need)), self.S, self.n)
        if isinstance(n, Globally):
            return kernel.op_globally(self.value(n.arg, env, T, sets, self.need_future(need)), self.S, self.n)
        if isinstance(n, Until):
            nf = self.need_future(need)
            return kernel.op_until(self.value(n.left, env, T, sets, nf),
                                   self.value(n.right, env, T, sets, nf), self.S, self.n)
        if isinstance(n, TraceQ):
            return self.trace_quant(n, env, T, sets, need)
        if isinstance(n, PropQ):
            if self.logic == Logic.HYPERQPTL:
                return self.prop_quant_uniform(n, env, T, sets, need)
            return self.prop_quant_plus(n, env, T, sets, need)
        if isinstance(n, SetQ):
            return self.set_quant(n, env, T, sets, need)
        raise EvaluationError(f"unexpected node {type(n).__name__}")

    def _combine(self, n, need, results):
        """OR (exists) / AND (forall) with short-circuit on ``need``."""
        if n.exists:
            acc = 0
            for r in results:
                acc |= r()
                if (acc & need) == need:
                    break
            return acc
        acc = self.full
        for r in results:
            acc &= r()
            if not (acc & need):
                break
        return acc

    # -- trace quantifiers
    def domain(self, n, T, sets):
        if n.domain is None or n.domain == XD:
            return T
        if n.domain == XA:
            return self.universe()
        return sets[n.domain]

    def trace_quant(self, n, env, T, sets, need):
        dom = self.domain(n, T, sets)
        cands = self.trace_candidates(n, dom, env, T, need)
        body = n.body
        var = n.var
        return self._combine(n, need, (
            (lambda t=t: self.value(body, {**env, var: t}, T, sets, need)) for t in cands))

    def trace_candidates(self, n, dom, env, T, need):
        guards = self._qf_guards(n)
        ordered = sorted(dom)
        if not guards:
            return ordered
        gfv = sorted(set().union(*(self.info.fv_trace(g) for g in guards)) - {n.var})
        key = ("tg", id(n), self.sid(dom if isinstance(dom, frozenset) else frozenset(dom)),
               self.sid(T), need, tuple(env[v] for v in gfv))
        hit = self._guards.get(key)
        if hit is not None:
            return hit
        out = []
        for t in ordered:
            e2 = {**env, n.var: t}
            ok = True
            for g in guards:
                if not (self.run_qf(g, e2, T) & need):
                    ok = False
                    break
            if ok:
                out.append(t)
        self._guards[key] = out
        return out

    def _qf_guards(self, n):
        k = ("qg", id(n))
        g = self._guards.get(k)
        if g is None:
            g = [c for c in _guard_part(n) if is_quantifier_free(c)]
            self._guards[k] = g
        return g

    # -- propositional quantifiers
    def prop_quant_uniform(self, n, env, T, sets, need):
        k = self.index[n.prop]
        body = n.body

        def branch(row):
            T2 = frozenset(t[:k] + (row,) + t[k + 1:] for t in T)
            return self.value(body, env, T2, sets, need)

        return self._combine(n, need, ((lambda r=r: branch(r)) for r in self.rows(n.prop)))

    def _single_reader(self, n):
        """``Qq. Qpi. psi`` with the same polarity where only ``pi`` reads ``q``."""
        k = ("sr", id(n))
        v = self._guards.get(k)
        if v is None:
            b = n.body
            v = False
            if isinstance(b, TraceQ) and b.exists == n.exists and b.domain is None:
                v = True
                for m in walk(b.body):
                    if isinstance(m, Atom) and m.prop == n.prop and m.var != b.var:
                        v = False
                    elif isinstance(m, PropQ) and m.prop == n.prop:
                        v = False
                    elif isinstance(m, TraceQ) and m.var == b.var:
                        v = False
            self._guards[k] = v
        return v

    def prop_quant_plus(self, n, env, T, sets, need):
        k = self.index[n.prop]
        rows = self.rows(n.prop)
        classes = sorted({t[:k] + (0,) + t[k + 1:] for t in T})
        if self._single_reader(n):
            Tplus = frozenset(c[:k] + (r,) + c[k + 1:] for c in classes for r in rows)
            return self.value(n.body, env, Tplus, sets, need)
        allowed = []
        guards = self._prop_guards(n) if need.bit_count() == 1 else []
        for c in classes:
            ok_rows = []
            for r in rows:
                t = c[:k] + (r,) + c[k + 1:]
                if all((self.run_qf(g.body, {**env, g.var: t}, T) & need) == need for g in guards):
                    ok_rows.append(t)
            if not ok_rows:
                # every relabelling violates a guard
                return 0 if n.exists else self.full
            allowed.append(ok_rows)
        subsets = [[s for size in range(1, len(rs) + 1) for s in itertools.combinations(rs, size)]
                   for rs in allowed]
        body = n.body

        def choices():
            for combo in itertools.product(*subsets):
                T2 = frozenset(itertools.chain.from_iterable(combo))
                yield lambda T2=T2: self.value(body, env, T2, sets, need)

        return self._combine(n, need, choices())

    def _prop_guards(self, n):
        k = ("pg", id(n))
        g = self._guards.get(k)
        if g is None:
            g = [c for c in _guard_part(n)
                 if isinstance(c, TraceQ) and not c.exists and c.domain is None and is_quantifier_free(c.body)]
            self._guards[k] = g
        return g

    # -- set quantifiers
    def set_quant(self, n, env, T, sets, need):
        U = self.universe()
        cands = list(U)
        if need.bit_count() == 1:
            for g in _guard_part(n):
                if (isinstance(g, TraceQ) and not g.exists and g.domain == n.var
                        and n.var not in self.info.fv_sets(g.body)):
                    cands = [t for t in cands
                             if (self.value(g.body, {**env, g.var: t}, T, sets, need) & need) == need]
        if 2 ** len(cands) > self.cap:
            raise CapExceeded(f"set quantifier over {len(cands)} candidate traces exceeds cap {self.cap}")
        body = n.body
        var = n.var

        def choices():
            for size in range(len(cands) + 1):
                for combo in itertools.combinations(cands, size):
                    s = frozenset(combo)
                    yield lambda s=s: self.value(body, env, T, {**sets, var: s}, need)

        return self._combine(n, need, choices())

    def run(self):
        sets = {XD: self.T0}
        if any(isinstance(n, TraceQ) and n.domain == XA for n in walk(self.root)):
            sets[XA] = frozenset(self.universe())
        for X, members in self.assignment.sets.items():
            sets[X] = frozenset(self._encode(t) for t in members)
        env = {v: self._encode(t) for v, t in self.assignment.traces.items()}
        return bool(self.value(self.root, env, self.T0, sets, 1) & 1)


def _check(T, f, logic, params, assignment=None):
    if f.logic != logic:
        raise EvaluationError(f"expected a {logic.value} formula, got {f.logic.value}")
    if assignment is None:
        if not check_sentence(f):
            raise EvaluationError("formula is not a sentence")
    else:
        if assignment.props:
            raise EvaluationError("free propositional variables are not supported")
        tv, pv, sv = free_vars(f)
        missing = (set(tv) - set(assignment.traces)) | set(pv) | (
            set(sv) - set(assignment.sets) - {XA, XD})
        if missing:
            raise EvaluationError(f"unassigned free variables {sorted(missing)}")
    if not T.members:
        raise EvaluationError("trace set must be nonempty")
    if params.ap is not None:
        if not T.ap <= params.ap:
            raise AlphabetError("trace set alphabet exceeds the declared alphabet")
        extra = propositions(f) - params.ap
        if extra:
            raise AlphabetError(f"formula uses propositions outside the alphabet: {sorted(extra)}")


def eval_hyperqptl(T, f, params=EvalParams(), assignment=None):
    _check(T, f, Logic.HYPERQPTL, params, assignment)
    return _Evaluator(f.logic, f.root, T, params, assignment).run()


def eval_hyperqptl_plus(T, f, params=EvalParams(), assignment=None):
    _check(T, f, Logic.HQPTL_PLUS, params, assignment)
    return _Evaluator(f.logic, f.root, T, params, assignment).run()


def eval_hyper2ltl(T, f, params=EvalParams(), assignment=None):
    _check(T, f, Logic.H2L, params, assignment)
    return _Evaluator(f.logic, f.root, T, params, assignment).run()


def evaluate(T, f, params=EvalParams(), assignment=None):
    """Dispatch on the formula's logic."""
    return {Logic.HYPERQPTL: eval_hyperqptl, Logic.HQPTL_PLUS: eval_hyperqptl_plus,
            Logic.H2L: eval_hyper2ltl}[f.logic](T, f, params, assignment)
