"""Formula translations: bounded Sigma^2_1 arithmetic to HyperQPTL, Hyper2LTL to
HyperQPTL+, and HyperQPTL+ back to Hyper2LTL, plus their auxiliary sentences."""
from __future__ import annotations

from hyperq.arith import build_theta_eq_n, is_sigma21
from hyperq.formula import (
    XA, XD, And, ArithQ, Atom, AxiomPlusTimes, Const, Eq, Eventually, Formula, FreshNames,
    Globally, Iff, Implies, Less, Logic, Member, Next, Not, Or, PAtom, Plus, PropQ, SetQ, Times,
    TraceQ, Until, all_names, arith_free_vars, check_sentence, conj, propositions,
    rename_apart, to_prenex, walk,
)
from hyperq.semantics import (
    PT_PROPS, bounded_plus_times, t_plus_times_member,  # noqa: F401  (re-exported)
)
from hyperq.traces import LassoTrace, TraceSet, UniverseParams, enumerate_universe

X_PROP = "x"
Q_PROP = "q"


class ReductionError(ValueError):
    pass


class ReductionContext:
    """Fresh-name supply for one translation; remembers what it generated."""

    def __init__(self, taken=(), b=0):
        self.fresh = FreshNames(taken)
        self.input_names = frozenset(taken)
        self.generated = set()
        self.markers = {}
        self.b = b

    def new(self, base):
        name = self.fresh(base)
        self.generated.add(name)
        return name

    def marker(self, key):
        if key not in self.markers:
            self.markers[key] = self.new(f"m{len(self.markers) + 1}")
        return self.markers[key]

    def check_fresh(self):
        clash = self.generated & self.input_names
        if clash:
            raise ReductionError(f"generated names collide with the input: {sorted(clash)}")
        return True


def _hq(node):
    return Formula(Logic.HYPERQPTL, node)


# -- Lemma 1 ----------------------------------------------------------------


def build_theta_all():
    """forall q. exists pi. G (q <-> x[pi])"""
    return _hq(PropQ(False, Q_PROP, TraceQ(True, "pi", Globally(Iff(PAtom(Q_PROP), Atom(X_PROP, "pi"))))))


def theta_cons_part(m, prop_iff, pi="pi", pi2="pi'"):
    """forall pi. X G !m[pi] & forall pi'. (agree(pi, pi') -> (m[pi] <-> m[pi']))"""
    return TraceQ(False, pi, And(
        Next(Globally(Not(Atom(m, pi)))),
        TraceQ(False, pi2, Implies(prop_iff(pi, pi2), Iff(Atom(m, pi), Atom(m, pi2))))))


def build_theta_cons(k, markers=None):
    if k < 1:
        raise ReductionError("theta_cons needs k >= 1")
    markers = markers or [f"m{j}" for j in range(1, k + 1)]

    def same_x(a, b):
        return Globally(Iff(Atom(X_PROP, a), Atom(X_PROP, b)))

    return _hq(conj(*(theta_cons_part(m, same_x) for m in markers)))


def singleton_guard(pi):
    """(!x[pi]) U (x[pi] & X G !x[pi])"""
    return Until(Not(Atom(X_PROP, pi)), And(Atom(X_PROP, pi), Next(Globally(Not(Atom(X_PROP, pi))))))


def trace_var(y):
    return f"pi_{y}"


def desugar_eq(n):
    if isinstance(n, Eq):
        return Not(Or(Less(n.left, n.right), Less(n.right, n.left)))
    if isinstance(n, ArithQ):
        return ArithQ(n.exists, n.order, n.var, desugar_eq(n.body))
    if isinstance(n, Not):
        return Not(desugar_eq(n.arg))
    if isinstance(n, (Or, And, Implies, Iff)):
        return type(n)(desugar_eq(n.left), desugar_eq(n.right))
    return n


def hyp(psi, ctx=None, markers=None):
    """Arithmetic formula (orders 1 and 2, membership in outer third-order
    variables) to a HyperQPTL formula over x, the markers and T_(+,*) props."""
    root = psi.root if isinstance(psi, Formula) else psi
    markers = markers or {}
    ctx = ctx or ReductionContext(all_names(root) | {trace_var(v) for v in _arith_names(root)})
    root = desugar_eq(root)

    def arith(n, op):
        pi = ctx.new("pi")
        return TraceQ(True, pi, conj(
            Atom(op, pi),
            Eventually(And(Atom(X_PROP, trace_var(n.a)), Atom("arg1", pi))),
            Eventually(And(Atom(X_PROP, trace_var(n.b)), Atom("arg2", pi))),
            Eventually(And(Atom(X_PROP, trace_var(n.c)), Atom("res", pi)))))

    def go(n):
        if isinstance(n, ArithQ):
            if n.order == 3:
                raise ReductionError("third-order quantifier inside the matrix")
            pi = trace_var(n.var)
            body = go(n.body)
            if n.order == 2:
                return TraceQ(n.exists, pi, body)
            guard = singleton_guard(pi)
            return TraceQ(n.exists, pi, And(guard, body) if n.exists else Implies(guard, body))
        if isinstance(n, Not):
            return Not(go(n.arg))
        if isinstance(n, (Or, And, Implies, Iff)):
            return type(n)(go(n.left), go(n.right))
        if isinstance(n, Const):
            return n
        if isinstance(n, Member):
            if n.order == 2:
                if n.container not in markers:
                    raise ReductionError(f"{n.container} is not an outer third-order variable")
                return Atom(markers[n.container], trace_var(n.elem))
            return Eventually(And(Atom(X_PROP, trace_var(n.elem)), Atom(X_PROP, trace_var(n.container))))
        if isinstance(n, Less):
            return Eventually(And(Atom(X_PROP, trace_var(n.left)),
                                  Next(Eventually(Atom(X_PROP, trace_var(n.right))))))
        if isinstance(n, Plus):
            return arith(n, "add")
        if isinstance(n, Times):
            return arith(n, "mult")
        raise ReductionError(f"hyp is undefined on {type(n).__name__}")

    return _hq(go(root))


def _arith_names(root):
    out = set(arith_free_vars(root))
    for n in walk(root):
        if isinstance(n, ArithQ):
            out.add(n.var)
    return out


def split_sigma21(phi):
    if not is_sigma21(phi):
        raise ReductionError("formula is not of the form exists3 ... . psi with psi of order <= 2")
    n = phi.root
    outer = []
    while isinstance(n, ArithQ) and n.order == 3:
        outer.append(n.var)
        n = n.body
    return outer, n


def sigma21_to_hyperqptl(phi, prenex=True):
    outer, psi = split_sigma21(phi)
    names = all_names(phi.root) | {trace_var(v) for v in _arith_names(phi.root)}
    ctx = ReductionContext(names)
    markers = {y: ctx.marker(y) for y in outer}
    parts = [build_theta_all().root]
    if outer:
        parts.append(build_theta_cons(len(outer), [markers[y] for y in outer]).root)
    parts.append(AxiomPlusTimes())
    parts.append(hyp(psi, ctx, markers).root)
    f = _hq(conj(*parts))
    ctx.check_fresh()
    return to_prenex(f) if prenex else f


def instance_formula(n, phi_x, var="x", prenex=True):
    """``exists x . theta_{=n}(x) & phi(x)`` translated."""
    root = phi_x.root if isinstance(phi_x, Formula) else phi_x
    outer = []
    while isinstance(root, ArithQ) and root.order == 3 and root.exists:
        outer.append(root)
        root = root.body
    fresh = FreshNames(all_names(phi_x.root if isinstance(phi_x, Formula) else phi_x) | {var})
    theta = build_theta_eq_n(n, var, fresh).root
    body = ArithQ(True, 1, var, And(theta, root))
    for q in reversed(outer):
        body = ArithQ(True, 3, q.var, body)
    return sigma21_to_hyperqptl(Formula(Logic.ARITH, body), prenex=prenex)


# -- T_alpha (correspondence harness) -----------------------------------------


def x_row(values, N, tail=False, extra=None, ap=None):
    """Trace with x exactly at ``values`` below N, and everywhere from N on if ``tail``."""
    stem = [({X_PROP} if i in values else set()) | (extra[i] if extra and i < len(extra) else set())
            for i in range(N)]
    loop = [{X_PROP}] if tail else [set()]
    ap = ap or {X_PROP}
    return LassoTrace(ap, stem, loop)


def build_t_alpha(families, N=8):
    """Model for the Lemma 1 harness at bounds (sigma=N, lambda=1).

    ``families`` lists, per third-order variable, a set of frozensets (subsets
    of 0..N-1).  One trace per bounded x-row (finite part below N, with or
    without an all-x tail), markers at position 0 by membership of the finite
    part, each joined with a T_(+,*) row so every member occurs.
    """
    k = len(families)
    markers = [f"m{j}" for j in range(1, k + 1)]
    ap = frozenset({X_PROP, Q_PROP, *markers, *PT_PROPS})
    pt = bounded_plus_times(N).sorted()
    out = []
    idx = 0
    for tail in (False, True):
        for mask in range(2 ** N):
            A = frozenset(i for i in range(N) if (mask >> i) & 1)
            r = pt[idx % len(pt)]
            idx += 1
            horizon = max(N, len(r.stem))
            stem = []
            for i in range(horizon):
                letter = set(r.value_at(i))
                if i < N and i in A:
                    letter.add(X_PROP)
                if i == 0:
                    letter |= {m for m, fam in zip(markers, families) if A in fam}
                stem.append(letter)
            loop = [set(r.loop[0]) | ({X_PROP} if tail else set())]
            out.append(LassoTrace(ap, stem, loop))
    if idx < len(pt):
        raise ReductionError("domain too small to carry every T_(+,*) member")
    return TraceSet(ap, out), markers


def pi_alpha(T, first, second, N=8):
    """Trace assignment mimicking first-order values and finite sets."""

    def find(values):
        for t in T.sorted():
            if not any(X_PROP in t.value_at(i) for i in range(N, N + len(t.loop))) and \
                    frozenset(i for i in range(N) if X_PROP in t.value_at(i)) == values:
                return t
        raise ReductionError(f"no trace encodes {sorted(values)}")

    out = {}
    for y, v in first.items():
        out[trace_var(y)] = find(frozenset([v]))
    for y, s in second.items():
        out[trace_var(y)] = find(frozenset(s))
    return out


# -- Lemma 3: Hyper2LTL -> HyperQPTL+ ------------------------------------------


def _big_conj(parts):
    return conj(*parts)


def h2l_to_hqptlplus(phi, prenex=True):
    if phi.logic != Logic.H2L:
        raise ReductionError("expected a Hyper2LTL sentence")
    if not check_sentence(phi):
        raise ReductionError("input must be a sentence")
    phi = rename_apart(phi)
    root = phi.root
    props = sorted(propositions(root))
    ctx = ReductionContext(all_names(root) | {XA, XD})
    p_all = {p: ctx.new(f"{p}_all") for p in props}
    p_temp = {p: ctx.new(f"{p}_temp") for p in props}
    set_vars = [n.var for n in walk(root) if isinstance(n, SetQ)]
    for X in set_vars:
        ctx.marker(X)

    pi, pi2 = ctx.new("pi"), ctx.new("pi'")
    complete = TraceQ(False, pi, TraceQ(True, pi2, _big_conj(
        [Globally(Iff(Atom(p_temp[p], pi), Atom(p_all[p], pi2))) for p in props])))
    for p in reversed(props):
        complete = PropQ(False, p_temp[p], complete)

    def agree_all(a, b):
        return _big_conj([Globally(Iff(Atom(p_all[p], a), Atom(p_all[p], b))) for p in props])

    def theta_cons_j(X):
        return theta_cons_part(ctx.markers[X], agree_all, ctx.new("pi"), ctx.new("pi'"))

    def f1(n, allvars):
        if isinstance(n, SetQ):
            m = ctx.markers[n.var]
            if n.exists:
                return PropQ(True, m, And(theta_cons_j(n.var), f1(n.body, allvars)))
            return PropQ(False, m, Implies(theta_cons_j(n.var), f1(n.body, allvars)))
        if isinstance(n, TraceQ):
            if n.domain == XD:
                return TraceQ(n.exists, n.var, f1(n.body, allvars))
            inner = f1(n.body, allvars | {n.var})
            if n.domain == XA:
                return TraceQ(n.exists, n.var, inner)
            m = ctx.markers[n.domain]
            if n.exists:
                return TraceQ(True, n.var, And(Atom(m, n.var), inner))
            return TraceQ(False, n.var, Implies(Atom(m, n.var), inner))
        if isinstance(n, Atom):
            if n.var in allvars and n.prop in p_all:
                return Atom(p_all[n.prop], n.var)
            return n
        if isinstance(n, Const):
            return n
        if isinstance(n, (Not, Next, Eventually, Globally)):
            return type(n)(f1(n.arg, allvars))
        if isinstance(n, (Or, And, Implies, Iff, Until)):
            return type(n)(f1(n.left, allvars), f1(n.right, allvars))
        raise ReductionError(f"unexpected node {type(n).__name__}")

    body = And(complete, f1(root, frozenset()))
    for p in reversed(props):
        body = PropQ(True, p_all[p], body)
    ctx.check_fresh()
    f = Formula(Logic.HQPTL_PLUS, body)
    return to_prenex(f) if prenex else f


# -- Lemma 4: HyperQPTL+ -> Hyper2LTL ------------------------------------------


def theta_q(q, new, old, props, ctx):
    """Both directions of ``new =_{AP minus q} old``."""
    others = [p for p in props if p != q]

    def half(a, b):
        pi, pi2 = ctx.new("pi"), ctx.new("pi'")
        return TraceQ(False, pi, TraceQ(True, pi2, _big_conj(
            [Globally(Iff(Atom(p, pi), Atom(p, pi2))) for p in others]), b), a)

    return And(half(new, old), half(old, new))


def hqptlplus_to_h2l(phi, prenex=True):
    """Each propositional quantifier binds a fresh set variable holding the
    relabelled model; trace quantifiers range over the current one."""
    if phi.logic != Logic.HQPTL_PLUS:
        raise ReductionError("expected a HyperQPTL+ sentence")
    if not check_sentence(phi):
        raise ReductionError("input must be a sentence")
    phi = rename_apart(phi)
    root = phi.root
    props = sorted(propositions(root))
    ctx = ReductionContext(all_names(root) | {XA, XD})

    def f1(n, cur):
        if isinstance(n, TraceQ):
            return TraceQ(n.exists, n.var, f1(n.body, cur), cur)
        if isinstance(n, PropQ):
            new = ctx.new("X1")
            th = theta_q(n.prop, new, cur, props, ctx)
            if n.exists:
                return SetQ(True, new, And(th, f1(n.body, new)))
            return SetQ(False, new, Implies(th, f1(n.body, new)))
        if isinstance(n, (Atom, Const)):
            return n
        if isinstance(n, (Not, Next, Eventually, Globally)):
            return type(n)(f1(n.arg, cur))
        if isinstance(n, (Or, And, Implies, Iff, Until)):
            return type(n)(f1(n.left, cur), f1(n.right, cur))
        raise ReductionError(f"unexpected node {type(n).__name__}")

    f = Formula(Logic.H2L, f1(root, XD))
    ctx.check_fresh()
    if not prenex:
        return f
    # theta_q makes the new set nonempty whenever the old one is, starting
    # from X_d, so no generated set is empty where it matters
    return to_prenex(f, inhabited=True)


def live_set_variables(f):
    """Largest number of set variables that are bound (or distinguished and used)
    and still referenced below, over all points of the formula."""
    best = 0

    def used(n):
        out = set()
        for m in walk(n):
            if isinstance(m, TraceQ) and m.domain:
                out.add(m.domain)
        return out

    def go(n, bound):
        nonlocal best
        live = {X for X in bound if X in used(n)}
        if XD in used(n):
            live.add(XD)
        best = max(best, len(live))
        if isinstance(n, SetQ):
            go(n.body, bound | {n.var})
            return
        for k in (n.body,) if isinstance(n, TraceQ) else _kids(n):
            go(k, bound)

    go(f.root, frozenset())
    return best


def _kids(n):
    from hyperq.formula import children

    return children(n)


TRANSLATIONS = {
    ("h2l", "hqptl+"): h2l_to_hqptlplus,
    ("hqptl+", "h2l"): hqptlplus_to_h2l,
    ("arith", "hyperqptl"): sigma21_to_hyperqptl,
}


def translate(f, target):
    fn = TRANSLATIONS.get((f.logic.value, target))
    if fn is None:
        raise ReductionError(f"no translation from {f.logic.value} to {target}")
    return fn(f)


__all__ = [
    "ReductionContext", "ReductionError", "build_theta_all", "build_theta_cons", "hyp",
    "sigma21_to_hyperqptl", "instance_formula", "h2l_to_hqptlplus", "hqptlplus_to_h2l",
    "theta_q", "t_plus_times_member", "build_t_alpha", "pi_alpha", "translate",
    "live_set_variables", "singleton_guard", "UniverseParams", "enumerate_universe",
]
