"""Abstract syntax shared by HyperQPTL, HyperQPTL+, Hyper2LTL and bounded arithmetic.

Nodes are plain frozen dataclasses; a :class:`Formula` wraps a node tree with
the logic it belongs to and rejects variants that the logic does not have.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field


class Logic(str, enum.Enum):
    HYPERQPTL = "hyperqptl"
    HQPTL_PLUS = "hqptl+"
    H2L = "h2l"
    ARITH = "arith"


XA = "Xa"
XD = "Xd"
DISTINGUISHED = (XA, XD)


class LogicError(ValueError):
    """A node was used in a logic that does not have it."""


class PrenexError(ValueError):
    def __init__(self, msg, subformula=None):
        super().__init__(msg)
        self.subformula = subformula


class Node:
    __slots__ = ()


# -- temporal / Boolean core ------------------------------------------------


@dataclass(frozen=True)
class Const(Node):
    value: bool


@dataclass(frozen=True)
class Atom(Node):
    """Labeled atom ``p_pi``."""

    prop: str
    var: str


@dataclass(frozen=True)
class PAtom(Node):
    """Unlabeled atom ``q`` (HyperQPTL only)."""

    prop: str


@dataclass(frozen=True)
class Not(Node):
    arg: Node


@dataclass(frozen=True)
class Or(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class And(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Implies(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Iff(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Next(Node):
    arg: Node


@dataclass(frozen=True)
class Eventually(Node):
    arg: Node


@dataclass(frozen=True)
class Globally(Node):
    arg: Node


@dataclass(frozen=True)
class Until(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class TraceQ(Node):
    """``exists pi . body`` / ``forall pi . body``; ``domain`` is the set
    variable of a Hyper2LTL membership quantifier and None otherwise."""

    exists: bool
    var: str
    body: Node
    domain: str | None = None


@dataclass(frozen=True)
class PropQ(Node):
    exists: bool
    prop: str
    body: Node


@dataclass(frozen=True)
class SetQ(Node):
    exists: bool
    var: str
    body: Node


@dataclass(frozen=True)
class AxiomPlusTimes(Node):
    """Opaque stand-in for the HyperLTL sentence implementing + and *."""


# -- arithmetic -------------------------------------------------------------


@dataclass(frozen=True)
class Less(Node):
    left: str
    right: str


@dataclass(frozen=True)
class Eq(Node):
    left: str
    right: str


@dataclass(frozen=True)
class Plus(Node):
    """``a + b = c``"""

    a: str
    b: str
    c: str


@dataclass(frozen=True)
class Times(Node):
    """``a * b = c``"""

    a: str
    b: str
    c: str


@dataclass(frozen=True)
class Member(Node):
    """``elem in container``; order 1 is ``y in Y``, order 2 is ``Y in YY``."""

    elem: str
    container: str
    order: int


@dataclass(frozen=True)
class ArithQ(Node):
    exists: bool
    order: int
    var: str
    body: Node


UNARY = (Not, Next, Eventually, Globally)
BINARY = (Or, And, Implies, Iff, Until)
QUANTIFIERS = (TraceQ, PropQ, SetQ, ArithQ)
TEMPORAL = (Next, Eventually, Globally, Until)

_COMMON = {Const, Not, Or, And, Implies, Iff}
_TEMPORAL = {Atom, Next, Eventually, Globally, Until}
ALLOWED = {
    Logic.HYPERQPTL: _COMMON | _TEMPORAL | {PAtom, TraceQ, PropQ, AxiomPlusTimes},
    Logic.HQPTL_PLUS: _COMMON | _TEMPORAL | {TraceQ, PropQ},
    Logic.H2L: _COMMON | _TEMPORAL | {TraceQ, SetQ},
    Logic.ARITH: _COMMON | {Less, Eq, Plus, Times, Member, ArithQ},
}

CORE = {
    Logic.HYPERQPTL: {Atom, PAtom, Not, Or, Next, Eventually, TraceQ, PropQ, AxiomPlusTimes},
    Logic.HQPTL_PLUS: {Atom, Not, Or, Next, Eventually, TraceQ, PropQ},
    Logic.H2L: {Atom, Not, Or, Next, Until, TraceQ, SetQ},
}


def children(node):
    if isinstance(node, UNARY):
        return (node.arg,)
    if isinstance(node, BINARY):
        return (node.left, node.right)
    if isinstance(node, QUANTIFIERS):
        return (node.body,)
    return ()


def rebuild(node, kids):
    """Copy ``node`` with new children (same arity as :func:`children`)."""
    if isinstance(node, UNARY):
        return type(node)(kids[0])
    if isinstance(node, BINARY):
        return type(node)(kids[0], kids[1])
    if isinstance(node, TraceQ):
        return TraceQ(node.exists, node.var, kids[0], node.domain)
    if isinstance(node, PropQ):
        return PropQ(node.exists, node.prop, kids[0])
    if isinstance(node, SetQ):
        return SetQ(node.exists, node.var, kids[0])
    if isinstance(node, ArithQ):
        return ArithQ(node.exists, node.order, node.var, kids[0])
    return node


def walk(node):
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def size(node):
    return sum(1 for _ in walk(node))


def is_quantifier_free(node):
    return not any(isinstance(n, QUANTIFIERS) for n in walk(node))


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def _check_name(name, what):
    if not isinstance(name, str) or not _IDENT.match(name):
        raise LogicError(f"invalid {what} name {name!r}")


def arith_order_of_name(name):
    """Order of a *free* arithmetic variable, by naming convention."""
    if name[:1].islower() or name[:1] == "_":
        return 1
    if len(name) >= 2 and name[0].isupper() and name[1].isupper():
        return 3
    return 2


@dataclass(frozen=True)
class Formula:
    """A node tree tagged with its logic.  Construction validates the tree."""

    logic: Logic
    root: Node = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "logic", Logic(self.logic))
        validate(self.logic, self.root)

    def __str__(self):
        from hyperq.syntax import print_formula

        return print_formula(self)


def validate(logic, root):
    allowed = ALLOWED[Logic(logic)]
    arith_orders = {}
    stack = [(root, {})]
    while stack:
        node, scope = stack.pop()
        if type(node) not in allowed:
            raise LogicError(f"{type(node).__name__} is not part of {Logic(logic).value}")
        if isinstance(node, Atom):
            _check_name(node.prop, "proposition")
            _check_name(node.var, "trace variable")
        elif isinstance(node, PAtom):
            _check_name(node.prop, "proposition")
        elif isinstance(node, TraceQ):
            _check_name(node.var, "trace variable")
            if logic == Logic.H2L:
                if node.domain is None:
                    raise LogicError("Hyper2LTL trace quantifiers need a set domain")
                _check_name(node.domain, "set variable")
            elif node.domain is not None:
                raise LogicError("membership quantifiers only exist in Hyper2LTL")
        elif isinstance(node, PropQ):
            _check_name(node.prop, "proposition")
        elif isinstance(node, SetQ):
            _check_name(node.var, "set variable")
            if node.var in DISTINGUISHED:
                raise LogicError(f"distinguished set variable {node.var} cannot be quantified")
        elif isinstance(node, ArithQ):
            _check_name(node.var, "variable")
            if node.order not in (1, 2, 3):
                raise LogicError("arithmetic order must be 1, 2 or 3")
            scope = {**scope, node.var: node.order}
        elif isinstance(node, (Less, Eq, Plus, Times, Member)):
            if isinstance(node, Member):
                if node.order not in (1, 2):
                    raise LogicError("membership order must be 1 or 2")
                want = {node.elem: node.order, node.container: node.order + 1}
            else:
                want = {v: 1 for v in _arith_vars(node)}
            for v, order in want.items():
                _check_name(v, "variable")
                have = scope.get(v)
                if have is None:
                    have = arith_orders.setdefault(v, order)
                if have != order:
                    raise LogicError(f"variable {v} used at order {order} but has order {have}")
        for kid in children(node):
            stack.append((kid, scope))


def _arith_vars(node):
    if isinstance(node, (Less, Eq)):
        return (node.left, node.right)
    if isinstance(node, (Plus, Times)):
        return (node.a, node.b, node.c)
    if isinstance(node, Member):
        return (node.elem, node.container)
    return ()


# -- variables --------------------------------------------------------------


def free_vars(f):
    """Free (trace variables, unlabeled propositions, set variables).

    Set variables include domains of membership quantifiers; the distinguished
    ``Xa``/``Xd`` are reported like any other free set variable.
    """
    root = f.root if isinstance(f, Formula) else f
    tv, pv, sv = set(), set(), set()

    def go(n, bt, bp, bs):
        if isinstance(n, Atom):
            if n.var not in bt:
                tv.add(n.var)
        elif isinstance(n, PAtom):
            if n.prop not in bp:
                pv.add(n.prop)
        elif isinstance(n, TraceQ):
            if n.domain is not None and n.domain not in bs:
                sv.add(n.domain)
            go(n.body, bt | {n.var}, bp, bs)
        elif isinstance(n, PropQ):
            go(n.body, bt, bp | {n.prop}, bs)
        elif isinstance(n, SetQ):
            go(n.body, bt, bp, bs | {n.var})
        else:
            for k in children(n):
                go(k, bt, bp, bs)

    go(root, frozenset(), frozenset(), frozenset())
    return tv, pv, sv


def arith_free_vars(f):
    root = f.root if isinstance(f, Formula) else f
    out = set()

    def go(n, bound):
        if isinstance(n, ArithQ):
            go(n.body, bound | {n.var})
            return
        for v in _arith_vars(n):
            if v not in bound:
                out.add(v)
        for k in children(n):
            go(k, bound)

    go(root, frozenset())
    return out


def check_sentence(f):
    if f.logic == Logic.ARITH:
        return not arith_free_vars(f)
    tv, pv, sv = free_vars(f)
    if tv or pv:
        return False
    if f.logic == Logic.H2L:
        return sv <= set(DISTINGUISHED)
    return not sv


def propositions(f):
    """Every proposition name occurring in ``f`` (atoms and quantifiers)."""
    root = f.root if isinstance(f, Formula) else f
    out = set()
    for n in walk(root):
        if isinstance(n, (Atom, PAtom)):
            out.add(n.prop)
        elif isinstance(n, PropQ):
            out.add(n.prop)
    return out


def labeled_propositions(f):
    root = f.root if isinstance(f, Formula) else f
    return {n.prop for n in walk(root) if isinstance(n, Atom)}


def all_names(f):
    root = f.root if isinstance(f, Formula) else f
    out = set()
    for n in walk(root):
        if isinstance(n, Atom):
            out.update((n.prop, n.var))
        elif isinstance(n, PAtom):
            out.add(n.prop)
        elif isinstance(n, TraceQ):
            out.add(n.var)
            if n.domain:
                out.add(n.domain)
        elif isinstance(n, PropQ):
            out.add(n.prop)
        elif isinstance(n, (SetQ, ArithQ)):
            out.add(n.var)
        else:
            out.update(_arith_vars(n))
    return out


class FreshNames:
    """Supply of names avoiding a growing set of taken names."""

    def __init__(self, taken=()):
        self.taken = set(taken)

    def __call__(self, base):
        if base not in self.taken:
            self.taken.add(base)
            return base
        stem = base.rstrip("0123456789") or base
        for i in itertools.count(1):
            cand = f"{stem}{i}"
            if cand not in self.taken:
                self.taken.add(cand)
                return cand


# -- renaming apart ---------------------------------------------------------


def rename_apart(f):
    """Make every bound name unique and keep trace/set names disjoint from props.

    A labeled atom ``q_pi`` follows the renaming of a quantified ``q`` only when
    ``pi`` is bound inside the scope of that quantifier: traces bound earlier
    keep their original ``q`` row.
    """
    logic = f.logic
    root = f.root
    props = set() if logic == Logic.ARITH else propositions(root)
    tv, pv, sv = free_vars(root) if logic != Logic.ARITH else (set(), set(), set())
    fresh = FreshNames(all_names(root) | set(DISTINGUISHED))
    seen = set(tv) | set(sv) | set(pv) | set(DISTINGUISHED)
    if logic == Logic.ARITH:
        seen |= arith_free_vars(root)
    # trace-variable names that collide with proposition names are renamed too
    prop_pool = set(props)

    def pick(name, pool_clash=()):
        if name in seen or name in pool_clash:
            new = fresh(name)
        else:
            new = name
        seen.add(new)
        return new

    def go(n, tmap, pmap, smap, amap, inner):
        # inner: trace vars bound inside the scope of each renamed prop, per prop
        if isinstance(n, Atom):
            var = tmap.get(n.var, n.var)
            prop = n.prop
            ren = pmap.get(prop)
            if ren is not None and var in inner.get(prop, ()):
                prop = ren
            return Atom(prop, var)
        if isinstance(n, PAtom):
            return PAtom(pmap.get(n.prop, n.prop))
        if isinstance(n, TraceQ):
            new = pick(n.var, prop_pool)
            dom = smap.get(n.domain, n.domain) if n.domain is not None else None
            inner2 = {p: s | {new} for p, s in inner.items()}
            body = go(n.body, {**tmap, n.var: new}, pmap, smap, amap, inner2)
            return TraceQ(n.exists, new, body, dom)
        if isinstance(n, PropQ):
            new = pick(n.prop)
            prop_pool.add(new)
            inner2 = {**inner, n.prop: frozenset()}
            body = go(n.body, tmap, {**pmap, n.prop: new}, smap, amap, inner2)
            return PropQ(n.exists, new, body)
        if isinstance(n, SetQ):
            new = pick(n.var, prop_pool)
            return SetQ(n.exists, new, go(n.body, tmap, pmap, {**smap, n.var: new}, amap, inner))
        if isinstance(n, ArithQ):
            new = pick(n.var)
            return ArithQ(n.exists, n.order, new, go(n.body, tmap, pmap, smap, {**amap, n.var: new}, inner))
        if isinstance(n, (Less, Eq)):
            return type(n)(amap.get(n.left, n.left), amap.get(n.right, n.right))
        if isinstance(n, (Plus, Times)):
            return type(n)(*(amap.get(v, v) for v in (n.a, n.b, n.c)))
        if isinstance(n, Member):
            return Member(amap.get(n.elem, n.elem), amap.get(n.container, n.container), n.order)
        kids = children(n)
        if not kids:
            return n
        return rebuild(n, [go(k, tmap, pmap, smap, amap, inner) for k in kids])

    return Formula(logic, go(root, {}, {}, {}, {}, {}))


# -- sugar ------------------------------------------------------------------


def expand_sugar(f):
    """Rewrite ``f`` into the core connectives of its logic.

    HyperQPTL/HyperQPTL+: not, or, X, F.  ``a U b`` becomes
    ``existsP r . r & G(r -> (b | (a & X r))) & F b`` with a fresh proposition
    ``r``.  HyperQPTL+ has no unlabeled atoms, so there the row is read off a
    fresh witness trace: ``existsP r . exists rho . r[rho] & ...``.
    Hyper2LTL: not, or, X, U.  ``true``/``false`` become ``!a | a`` for an atom
    available in scope and stay constants otherwise.
    """
    logic = f.logic
    if logic == Logic.ARITH:
        return Formula(logic, _expand_arith(f.root))
    fresh = FreshNames(all_names(f.root) | set(DISTINGUISHED))
    props = sorted(labeled_propositions(f.root)) or ["p"]
    core = CORE[logic]

    def truth(scope):
        if scope:
            a = Atom(props[0], scope[-1])
            return Or(Not(a), a)
        return None

    def go(n, scope):
        if type(n) in core and not isinstance(n, QUANTIFIERS):
            kids = children(n)
            return rebuild(n, [go(k, scope) for k in kids]) if kids else n
        if isinstance(n, TraceQ):
            return TraceQ(n.exists, n.var, go(n.body, scope + (n.var,)), n.domain)
        if isinstance(n, (PropQ, SetQ)):
            return rebuild(n, [go(n.body, scope)])
        if isinstance(n, Const):
            t = truth(scope)
            if t is None:
                return n
            return t if n.value else Not(t)
        if isinstance(n, And):
            return Not(Or(Not(go(n.left, scope)), Not(go(n.right, scope))))
        if isinstance(n, Implies):
            return Or(Not(go(n.left, scope)), go(n.right, scope))
        if isinstance(n, Iff):
            a, b = go(n.left, scope), go(n.right, scope)
            return Not(Or(Not(Or(Not(a), b)), Not(Or(Not(b), a))))
        if isinstance(n, Globally):
            inner = go(n.arg, scope)
            if logic == Logic.H2L:
                t = truth(scope)
                top = t if t is not None else Const(True)
                return Not(Until(top, Not(inner)))
            return Not(Eventually(Not(inner)))
        if isinstance(n, Eventually):  # only reached for Hyper2LTL
            t = truth(scope)
            return Until(t if t is not None else Const(True), go(n.arg, scope))
        if isinstance(n, Until):  # HyperQPTL / HyperQPTL+
            a, b = go(n.left, scope), go(n.right, scope)
            r = fresh("r")
            if logic == Logic.HYPERQPTL:
                ra = PAtom(r)
            else:
                rho = fresh("rho")
                ra = Atom(r, rho)
            step = Or(Not(ra), Or(b, Not(Or(Not(a), Not(Next(ra))))))
            body = Not(Or(Not(ra), Or(Eventually(Not(step)), Not(Eventually(b)))))
            if logic != Logic.HYPERQPTL:
                body = TraceQ(True, rho, body)
            return PropQ(True, r, body)
        raise LogicError(f"cannot expand {type(n).__name__}")

    return Formula(logic, go(f.root, ()))


def _expand_arith(n):
    if isinstance(n, Eq):
        return Not(Or(Less(n.left, n.right), Less(n.right, n.left)))
    if isinstance(n, And):
        return Not(Or(Not(_expand_arith(n.left)), Not(_expand_arith(n.right))))
    if isinstance(n, Implies):
        return Or(Not(_expand_arith(n.left)), _expand_arith(n.right))
    if isinstance(n, Iff):
        a, b = _expand_arith(n.left), _expand_arith(n.right)
        return Not(Or(Not(Or(Not(a), b)), Not(Or(Not(b), a))))
    kids = children(n)
    return rebuild(n, [_expand_arith(k) for k in kids]) if kids else n


# -- prenex normal form -----------------------------------------------------


def _expand_iff_with_quantifiers(n):
    kids = children(n)
    if not kids:
        return n
    n = rebuild(n, [_expand_iff_with_quantifiers(k) for k in kids])
    if isinstance(n, Iff) and not (is_quantifier_free(n.left) and is_quantifier_free(n.right)):
        return And(Implies(n.left, n.right), Implies(n.right, n.left))
    return n


def _flip(q):
    return rebuild_quant(q, not q.exists)


def rebuild_quant(q, exists):
    if isinstance(q, TraceQ):
        return TraceQ(exists, q.var, q.body, q.domain)
    if isinstance(q, PropQ):
        return PropQ(exists, q.prop, q.body)
    if isinstance(q, SetQ):
        return SetQ(exists, q.var, q.body)
    return ArithQ(exists, q.order, q.var, q.body)


def _wrap(prefix, matrix):
    for q in reversed(prefix):
        matrix = rebuild(q, [matrix])
    return matrix


class _Emit:
    """Shared state while draining a prefix."""

    def __init__(self, inhabited):
        self.decided = set()
        self.inhabited = inhabited if inhabited is True else frozenset(inhabited)
        self.binder = {}  # hinted set -> polarity of its emitted binder
        self.rejected = []

    def safe(self, q, conj, neg):
        if _safe(q, conj, self.decided):
            return True
        # a hinted set may be entered first with its binder's polarity
        return self.binder.get(q.domain) == (q.exists != neg)


class _Seq:
    """Quantifiers in order, then an optional sub-cursor."""

    def __init__(self, qs, sub=None):
        self.qs, self.i, self.sub = qs, 0, sub

    def done(self):
        return self.i >= len(self.qs) and (self.sub is None or self.sub.done())

    def cands(self, st, neg):
        if self.i < len(self.qs):
            return [(self.qs[self.i], self._pop)]
        return self.sub.cands(st, neg) if self.sub else []

    def _pop(self):
        self.i += 1


class _Neg:
    def __init__(self, sub):
        self.sub = sub

    def done(self):
        return self.sub.done()

    def cands(self, st, neg):
        return [(_flip(q), pop) for q, pop in self.sub.cands(st, not neg)]


class _Merge:
    """Prefixes of the two operands of ``&`` / ``|``, left preferred."""

    def __init__(self, left, right, conj):
        self.left, self.right, self.conj = left, right, conj

    def done(self):
        return self.left.done() and self.right.done()

    def cands(self, st, neg):
        out = []
        for side in (self.left, self.right):
            for q, pop in side.cands(st, neg):
                if st.safe(q, self.conj, neg):
                    out.append((q, pop))
                else:
                    st.rejected.append((q, self.conj))
        return out


def _safe(q, conj, decided):
    if not isinstance(q, TraceQ) or q.domain in (None, XA, XD):
        return True
    # exists over & and forall over | are unaffected by an empty domain
    return q.exists == conj or q.domain in decided


def _emit(cursor, inhabited=()):
    """Drain a prefix cursor into a list.

    Every emitted quantifier scopes over everything after it, so once a
    trace quantifier over X is out, X is inhabited wherever the rest is
    evaluated and later quantifiers over X may cross any connective.
    Safety only grows with that set, so taking the first safe candidate
    never blocks an order that would otherwise succeed.  When nothing is
    safe, no prenex form exists: an empty set would turn the matrix into a
    constant.
    """
    out, st = [], _Emit(inhabited)
    while not cursor.done():
        st.rejected = []
        cands = cursor.cands(st, False)
        if not cands:
            q, conj = st.rejected[0]
            raise PrenexError(
                f"no equivalent prenex form: trace quantifier over {q.domain}, which may be empty, "
                f"cannot leave an {'&' if conj else '|'}", q)
        q, pop = cands[0]
        pop()
        out.append(q)
        if isinstance(q, SetQ) and (st.inhabited is True or q.var in st.inhabited):
            st.binder[q.var] = q.exists
        if isinstance(q, TraceQ) and q.domain not in (None, XA, XD):
            st.decided.add(q.domain)
    return out


def _prefix(n, logic):
    """Return (prefix cursor, matrix); quantifiers carry dummy bodies."""
    if isinstance(n, QUANTIFIERS):
        pre, mat = _prefix(n.body, logic)
        return _Seq([rebuild(n, [Const(True)])], pre), mat
    if isinstance(n, Not):
        pre, mat = _prefix(n.arg, logic)
        return _Neg(pre), Not(mat)
    if isinstance(n, Implies):
        return _prefix(Or(Not(n.left), n.right), logic) if not (
            is_quantifier_free(n.left) and is_quantifier_free(n.right)) else (_Seq([]), n)
    if isinstance(n, (And, Or)):
        lp, lm = _prefix(n.left, logic)
        rp, rm = _prefix(n.right, logic)
        return _Merge(lp, rp, isinstance(n, And)), type(n)(lm, rm)
    if isinstance(n, (Iff,) + TEMPORAL):
        for k in children(n):
            if not is_quantifier_free(k):
                raise PrenexError("quantifier under a temporal operator", n)
    return _Seq([]), n


def to_prenex(f, inhabited=()):
    """Quantifier prefix followed by a quantifier-free matrix.

    Quantifiers are hoisted in left-to-right encounter order after
    :func:`rename_apart`.  Raises :class:`PrenexError` naming the offending
    subformula if a quantifier sits under X/F/G/U, or if a Hyper2LTL trace
    quantifier over a possibly empty set would have to cross a connective
    that its empty-domain value changes.

    ``inhabited`` names quantified set variables whose empty value never
    decides the verdict, i.e. the sentence keeps its meaning when they range
    over nonempty sets only (``True`` means every one).  For those, the first trace quantifier emitted
    over the set may cross anything provided it has the polarity of the set
    binder; at the empty set the prefix then yields the binder's neutral
    value.  The caller vouches for the premise.
    """
    for n in walk(f.root):
        if isinstance(n, TEMPORAL) and any(not is_quantifier_free(k) for k in children(n)):
            raise PrenexError(f"quantifier under a temporal operator in {type(n).__name__}", n)
    if is_prenex(f.root):
        return f
    root = _expand_iff_with_quantifiers(f.root)
    g = rename_apart(Formula(f.logic, root))
    pre, mat = _prefix(g.root, f.logic)
    return Formula(f.logic, _wrap(_emit(pre, inhabited), mat))


def is_prenex(node):
    while isinstance(node, QUANTIFIERS):
        node = node.body
    return is_quantifier_free(node)


def split_prenex(node):
    prefix = []
    while isinstance(node, QUANTIFIERS):
        prefix.append(node)
        node = node.body
    return prefix, node


# -- helpers used by the constructions --------------------------------------


def conj(*parts):
    parts = [p for p in parts if not (isinstance(p, Const) and p.value)]
    if not parts:
        return Const(True)
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts):
    parts = [p for p in parts if not (isinstance(p, Const) and not p.value)]
    if not parts:
        return Const(False)
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out
