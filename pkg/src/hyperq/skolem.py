"""Expansion tables and Skolem-function semantics for HyperQPTL."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from hyperq.formula import (
    And, Atom, AxiomPlusTimes, Const, Eventually, Formula, Globally, Iff, Implies, Logic, Next,
    Not, Or, PAtom, PropQ, TraceQ, Until, children, is_quantifier_free, rebuild, split_prenex,
    walk,
)
from hyperq.semantics import Assignment, EvalParams, EvaluationError, _leaf_trace, _local_structure, eval_qf
from hyperq.traces import CapExceeded, enumerate_universe, get_cap


class SkolemError(ValueError):
    pass


# -- expansion tables ---------------------------------------------------------


def subformulas(psi):
    """Distinct subformulas, children before parents."""
    root = psi.root if isinstance(psi, Formula) else psi
    seen, out = set(), []

    def go(n):
        for k in children(n):
            go(k)
        if n not in seen:
            seen.add(n)
            out.append(n)

    go(root)
    return tuple(out)


def _structure(psi, a):
    lassos = []
    for n in walk(psi):
        if isinstance(n, Atom):
            lassos.append(_leaf_trace(a, ("t", n.var, n.prop)))
        elif isinstance(n, PAtom):
            lassos.append(_leaf_trace(a, ("p", n.prop)))
        elif isinstance(n, AxiomPlusTimes):
            raise EvaluationError("expansion tables cover trace and proposition atoms only")
    return _local_structure(lassos)


@dataclass(frozen=True)
class ExpansionTable:
    """Bit ``i`` of ``rows[k]`` is the value of ``subs[k]`` at position ``i``;
    positions run over ``0..n-1`` and the successor of ``n-1`` is ``S``."""

    subs: tuple
    S: int
    n: int
    rows: tuple

    def index(self, sub):
        return self.subs.index(sub)

    def get(self, sub, i):
        return bool((self.rows[self.index(sub)] >> i) & 1)

    def flip(self, k, i):
        rows = list(self.rows)
        rows[k] ^= 1 << i
        return ExpansionTable(self.subs, self.S, self.n, tuple(rows))


def build_expansion(psi, a):
    root = psi.root if isinstance(psi, Formula) else psi
    if not is_quantifier_free(root):
        raise EvaluationError("expansion tables need a quantifier-free formula")
    S, L = _structure(root, a)
    n = S + L
    subs = subformulas(root)
    rows = tuple(sum(1 << i for i in range(n) if eval_qf(a, i, s)) for s in subs)
    return ExpansionTable(subs, S, n, rows)


def _succ(i, S, n):
    return i + 1 if i + 1 < n else S


def _path(i, S, n):
    """Positions visited from ``i`` onwards, each once, in order."""
    out, j = [], i
    while j not in out:
        out.append(j)
        j = _succ(j, S, n)
    return out


def _expected(node, i, bit, S, n, a):
    """Value the consistency condition demands for ``node`` at ``i``."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Atom):
        return node.prop in a.traces[node.var].value_at(i)
    if isinstance(node, PAtom):
        return node.prop in a.props[node.prop].value_at(i)
    if isinstance(node, Not):
        return not bit(node.arg, i)
    if isinstance(node, Or):
        return bit(node.left, i) or bit(node.right, i)
    if isinstance(node, And):
        return bit(node.left, i) and bit(node.right, i)
    if isinstance(node, Implies):
        return (not bit(node.left, i)) or bit(node.right, i)
    if isinstance(node, Iff):
        return bit(node.left, i) == bit(node.right, i)
    if isinstance(node, Next):
        return bit(node.arg, _succ(i, S, n))
    if isinstance(node, Eventually):
        return any(bit(node.arg, j) for j in _path(i, S, n))
    if isinstance(node, Globally):
        return all(bit(node.arg, j) for j in _path(i, S, n))
    if isinstance(node, Until):
        for j in _path(i, S, n):
            if bit(node.right, j):
                return True
            if not bit(node.left, j):
                return False
        return False
    raise EvaluationError(f"no consistency condition for {type(node).__name__}")


def _row_ok(table, k, a, bit):
    node, row = table.subs[k], table.rows[k]
    return all(bool((row >> i) & 1) == _expected(node, i, bit, table.S, table.n, a)
               for i in range(table.n))


def check_consistency(table, a):
    """Every cell agrees with its local condition given the other cells."""
    idx = {s: k for k, s in enumerate(table.subs)}

    def bit(sub, i):
        return bool((table.rows[idx[sub]] >> i) & 1)

    try:
        return all(_row_ok(table, k, a, bit) for k in range(len(table.subs)))
    except KeyError:
        return False


def consistent_tables(psi, a, limit_bits=20):
    """Every consistent table, by exhaustive enumeration of all row choices.

    Rows are fixed children first and a row is dropped as soon as its own
    condition fails, which discards no consistent table.
    """
    root = psi.root if isinstance(psi, Formula) else psi
    S, L = _structure(root, a)
    n = S + L
    subs = subformulas(root)
    if len(subs) * n > limit_bits:
        raise CapExceeded(f"2^{len(subs) * n} tables exceed the enumeration limit")
    idx = {s: k for k, s in enumerate(subs)}
    found = []

    def go(k, rows):
        if k == len(subs):
            found.append(ExpansionTable(subs, S, n, tuple(rows)))
            return
        for row in range(1 << n):
            cur = rows + [row]
            probe = ExpansionTable(subs[:k + 1], S, n, tuple(cur))

            def bit(sub, i, cur=cur):
                return bool((cur[idx[sub]] >> i) & 1)

            if _row_ok(probe, k, a, bit):
                go(k + 1, cur)

    go(0, [])
    return found


def count_consistent_bruteforce(psi, a):
    """Consistent tables among all ``2^(|subs| * n)`` candidates, no pruning."""
    root = psi.root if isinstance(psi, Formula) else psi
    S, L = _structure(root, a)
    n = S + L
    subs = subformulas(root)
    count = 0
    for rows in itertools.product(range(1 << n), repeat=len(subs)):
        if check_consistency(ExpansionTable(subs, S, n, rows), a):
            count += 1
    return count


# -- Skolem functions ---------------------------------------------------------


@dataclass
class SkolemFunction:
    """Witness choice for ``owner`` given the universals quantified before it."""

    owner: str
    kind: str  # "trace" or "prop"
    signature: tuple
    table: dict

    def __call__(self, args):
        try:
            return self.table[tuple(args)]
        except KeyError:
            raise SkolemError(f"Skolem function for {self.owner} undefined on {args}") from None


@dataclass(frozen=True)
class _Slot:
    exists: bool
    kind: str
    name: str


def _prefix(phi):
    if phi.logic != Logic.HYPERQPTL:
        raise SkolemError("Skolem semantics is implemented for HyperQPTL")
    prefix, matrix = split_prenex(phi.root)
    if not is_quantifier_free(matrix):
        raise SkolemError("formula must be in prenex form")
    slots = []
    names = set()
    for q in prefix:
        if isinstance(q, TraceQ):
            slots.append(_Slot(q.exists, "trace", q.var))
            name = q.var
        elif isinstance(q, PropQ):
            slots.append(_Slot(q.exists, "prop", q.prop))
            name = q.prop
        else:
            raise SkolemError("unexpected quantifier")
        if name in names:
            raise SkolemError(f"{name} is quantified twice; rename apart first")
        names.add(name)
    if any(isinstance(n, AxiomPlusTimes) for n in walk(matrix)):
        raise SkolemError("AXIOM_PLUS_TIMES is not supported here")
    pos = {s.name: k for k, s in enumerate(slots)}
    props = {s.name for s in slots if s.kind == "prop"}
    return slots, _uniform(matrix, props, pos)


def _uniform(n, props, pos):
    """``q[pi]`` reads the row of a quantified ``q`` when ``pi`` is bound after
    ``q`` (its trace was drawn from the relabelled set)."""
    if isinstance(n, Atom) and n.prop in props and pos.get(n.var, -1) > pos[n.prop]:
        return PAtom(n.prop)
    kids = children(n)
    return rebuild(n, [_uniform(k, props, pos) for k in kids]) if kids else n


def signature(slots, k):
    return tuple(s.name for s in slots[:k] if not s.exists)


def _domains(T, slots, params):
    cap = get_cap(params.cap)
    traces = T.sorted()
    out = {}
    for s in slots:
        if s.kind == "trace":
            out[s.name] = traces
        else:
            out[s.name] = enumerate_universe({s.name}, params.universe, cap).sorted()
    return out


def _leaf(slots, values, matrix):
    a = Assignment(traces={s.name: values[s.name] for s in slots if s.kind == "trace"},
                   props={s.name: values[s.name] for s in slots if s.kind == "prop"})
    return eval_qf(a, 0, matrix)


def skolem_eval(T, phi, s, params=EvalParams()):
    """Matrix holds at 0 for every universal assignment, existentials chosen by ``s``."""
    slots, matrix = _prefix(phi)
    doms = _domains(T, slots, params)
    for k, sl in enumerate(slots):
        if sl.exists and sl.name not in s:
            raise SkolemError(f"missing Skolem function for {sl.name}")
    univ = [sl for sl in slots if not sl.exists]
    for combo in itertools.product(*(doms[u.name] for u in univ)):
        values = dict(zip((u.name for u in univ), combo))
        for k, sl in enumerate(slots):
            if sl.exists:
                f = s[sl.name]
                v = f(tuple(values[x] for x in signature(slots, k)))
                if v not in doms[sl.name]:
                    raise SkolemError(f"Skolem value for {sl.name} outside its domain")
                values[sl.name] = v
        if not _leaf(slots, values, matrix):
            return False
    return True


def search_skolem(T, phi, params=EvalParams()):
    """Lexicographically first Skolem family that works, or ``None``.

    Entries are ordered by owner (prefix order) and then by argument tuple;
    choosing at each universal history the first value from which the rest of
    the game is still won yields that family.
    """
    slots, matrix = _prefix(phi)
    doms = _domains(T, slots, params)
    tables = {sl.name: {} for sl in slots if sl.exists}

    def win(k, values):
        if k == len(slots):
            return _leaf(slots, values, matrix)
        sl = slots[k]
        if not sl.exists:
            return all(win(k + 1, {**values, sl.name: v}) for v in doms[sl.name])
        # entries written under a losing choice are overwritten by the winning one
        for v in doms[sl.name]:
            if win(k + 1, {**values, sl.name: v}):
                tables[sl.name][tuple(values[x] for x in signature(slots, k))] = v
                return True
        return False

    if not win(0, {}):
        return None
    return {sl.name: SkolemFunction(sl.name, sl.kind, signature(slots, k), tables[sl.name])
            for k, sl in enumerate(slots) if sl.exists}


__all__ = [
    "ExpansionTable", "SkolemFunction", "SkolemError", "build_expansion", "check_consistency",
    "consistent_tables", "count_consistent_bruteforce", "subformulas", "skolem_eval",
    "search_skolem", "signature",
]
