"""Lasso traces, trace sets, transition systems and bounded trace universes."""
from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass

DEFAULT_CAP = 4096


class CapExceeded(RuntimeError):
    """An enumeration would exceed the configured size cap."""


class AlphabetError(ValueError):
    pass


def get_cap(cap=None):
    if cap is not None:
        return cap
    env = os.environ.get("HYPERQ_CAP")
    return int(env) if env else DEFAULT_CAP


def _letter(s):
    return frozenset(s)


def _primitive(loop):
    n = len(loop)
    for d in range(1, n + 1):
        if n % d == 0 and loop == loop[:d] * (n // d):
            return loop[:d]
    return loop


def _letter_key(letter):
    return tuple(sorted(letter))


@dataclass(frozen=True)
class LassoTrace:
    """Ultimately periodic trace ``stem . loop^omega``, kept in canonical form.

    The loop is reduced to its primitive period and the stem is shortened as
    long as its last letter equals the loop's last letter (rotating the loop).
    Two traces denoting the same infinite word therefore compare equal.
    """

    ap: frozenset
    stem: tuple
    loop: tuple

    def __init__(self, ap, stem, loop):
        ap = frozenset(ap)
        stem = tuple(_letter(s) for s in stem)
        loop = tuple(_letter(s) for s in loop)
        if not loop:
            raise ValueError("loop must be nonempty")
        for letter in stem + loop:
            if not letter <= ap:
                raise AlphabetError(f"letter {sorted(letter)} not over {sorted(ap)}")
        loop = _primitive(loop)
        while stem and stem[-1] == loop[-1]:
            stem = stem[:-1]
            loop = loop[-1:] + loop[:-1]
        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "stem", stem)
        object.__setattr__(self, "loop", loop)

    def value_at(self, i):
        s = len(self.stem)
        if i < s:
            return self.stem[i]
        return self.loop[(i - s) % len(self.loop)]

    def holds(self, prop, i):
        return prop in self.value_at(i)

    def prefix(self, horizon):
        return [self.value_at(i) for i in range(horizon)]

    def masks(self, props, S, n):
        """Per-proposition bitmasks over positions ``0..n-1`` of a lasso structure
        with loop start ``S``; requires ``S >= len(stem)`` and ``len(loop) | n-S``."""
        out = []
        for p in props:
            m = 0
            for i in range(n):
                if p in self.value_at(i):
                    m |= 1 << i
            out.append(m)
        return tuple(out)

    def sort_key(self):
        return (len(self.stem), len(self.loop),
                tuple(_letter_key(s) for s in self.stem),
                tuple(_letter_key(s) for s in self.loop))

    def to_json(self):
        return {"stem": [sorted(s) for s in self.stem], "loop": [sorted(s) for s in self.loop]}

    def __repr__(self):
        def fmt(seq):
            return "[" + ",".join("{" + ",".join(sorted(s)) + "}" for s in seq) + "]"

        return f"Lasso({fmt(self.stem)}{fmt(self.loop)}^w)"


def lasso(stem, loop, ap=None):
    """Convenience constructor; ``ap`` defaults to the letters used."""
    if ap is None:
        ap = set().union(*map(set, stem), *map(set, loop))
    return LassoTrace(ap, stem, loop)


def _combine(traces, ap, fn):
    S = max(len(t.stem) for t in traces)
    L = 1
    for t in traces:
        L = math.lcm(L, len(t.loop))
    word = [fn([t.value_at(i) for t in traces]) for i in range(S + L)]
    return LassoTrace(ap, word[:S], word[S:])


def projection(t, sub):
    sub = frozenset(sub)
    if not sub <= t.ap:
        raise AlphabetError(f"{sorted(sub - t.ap)} not in the trace alphabet")
    return LassoTrace(sub, [s & sub for s in t.stem], [s & sub for s in t.loop])


def pointwise_union(t, u):
    if t.ap & u.ap:
        raise AlphabetError(f"alphabets overlap on {sorted(t.ap & u.ap)}")
    return _combine([t, u], t.ap | u.ap, lambda ls: ls[0] | ls[1])


@dataclass(frozen=True)
class TraceSet:
    ap: frozenset
    members: frozenset

    def __init__(self, ap, members):
        ap = frozenset(ap)
        members = frozenset(members)
        for t in members:
            if t.ap != ap:
                raise AlphabetError(f"trace alphabet {sorted(t.ap)} differs from {sorted(ap)}")
        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "members", members)

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self):
        return len(self.members)

    def __contains__(self, t):
        return t in self.members

    def sorted(self):
        return sorted(self.members, key=LassoTrace.sort_key)

    def project(self, sub):
        return TraceSet(sub, {projection(t, sub) for t in self.members})

    def to_json(self):
        return {"ap": sorted(self.ap), "traces": [t.to_json() for t in self.sorted()]}


def equal_modulo(T, U, sub):
    sub = frozenset(sub)
    if not (sub <= T.ap and sub <= U.ap):
        raise AlphabetError("sub-alphabet not contained in both trace sets")
    return T.project(sub).members == U.project(sub).members


def override_prop(T, q, row):
    """``T[q -> row]``: every member gets the q-row ``row``."""
    if q not in T.ap or row.ap != frozenset([q]):
        raise AlphabetError(f"override of {q!r} needs q in T.ap and a row over {{{q}}}")
    rest = T.ap - {q}
    return TraceSet(T.ap, {pointwise_union(projection(t, rest), row) for t in T.members})


@dataclass(frozen=True)
class UniverseParams:
    stem_bound: int = 0
    loop_bound: int = 1

    def __post_init__(self):
        if self.stem_bound < 0 or self.loop_bound < 1:
            raise ValueError("need stem_bound >= 0 and loop_bound >= 1")

    def __str__(self):
        return f"sigma={self.stem_bound}, lambda={self.loop_bound}"


def universe_raw_count(k, params):
    a = 2 ** k
    stems = sum(a ** s for s in range(params.stem_bound + 1))
    loops = sum(a ** l for l in range(1, params.loop_bound + 1))
    return stems * loops


def enumerate_universe(ap, params, cap=None):
    """All canonical lassos with stem <= sigma and loop <= lambda over ``ap``."""
    ap = frozenset(ap)
    cap = get_cap(cap)
    raw = universe_raw_count(len(ap), params)
    if raw > cap:
        raise CapExceeded(f"universe over {len(ap)} props at {params} has {raw} raw lassos > cap {cap}")
    props = sorted(ap)
    letters = [frozenset(c) for r in range(len(props) + 1) for c in itertools.combinations(props, r)]
    out = set()
    for s in range(params.stem_bound + 1):
        for stem in itertools.product(letters, repeat=s):
            for l in range(1, params.loop_bound + 1):
                for loop in itertools.product(letters, repeat=l):
                    out.add(LassoTrace(ap, stem, loop))
    return TraceSet(ap, out)


def rows(q, params, cap=None):
    """Bounded rows over the singleton alphabet ``{q}``, sorted."""
    return enumerate_universe({q}, params, cap).sorted()


# -- transition systems -----------------------------------------------------


@dataclass(frozen=True)
class TransitionSystem:
    ap: frozenset
    vertices: tuple
    edges: frozenset
    initial: frozenset
    labels: tuple  # (vertex, frozenset) pairs

    def __init__(self, ap, vertices, edges, initial, labels):
        ap = frozenset(ap)
        vertices = tuple(vertices)
        edges = frozenset(tuple(e) for e in edges)
        initial = frozenset(initial)
        labels = dict(labels)
        vs = set(vertices)
        if not initial:
            raise ValueError("initial vertex set is empty")
        if not initial <= vs:
            raise ValueError("initial vertices must be vertices")
        for a, b in edges:
            if a not in vs or b not in vs:
                raise ValueError(f"edge ({a},{b}) uses an unknown vertex")
        for v in vertices:
            if not any(a == v for a, _ in edges):
                raise ValueError(f"vertex {v} has no outgoing edge")
            if not frozenset(labels.get(v, ())) <= ap:
                raise AlphabetError(f"label of {v} not over the alphabet")
        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "labels", tuple((v, frozenset(labels.get(v, ()))) for v in vertices))

    def label(self, v):
        return dict(self.labels)[v]

    def successors(self, v):
        return sorted(b for a, b in self.edges if a == v)


def traces_of_system(ts, params, cap=None):
    """Labels of lasso paths with stem <= sigma and cycle <= lambda.

    A bounded under-approximation of the system's trace set.
    """
    cap = get_cap(cap)
    lab = dict(ts.labels)
    succ = {v: ts.successors(v) for v in ts.vertices}
    out = set()

    def cycles_from(c0):
        # walks c0..c_{l-1} with an edge back to c0
        stack = [(c0,)]
        while stack:
            walk = stack.pop()
            if c0 in succ[walk[-1]]:
                yield walk
            if len(walk) < params.loop_bound:
                stack.extend(walk + (n,) for n in succ[walk[-1]])

    def add(stem, cyc):
        out.add(LassoTrace(ts.ap, [lab[v] for v in stem], [lab[v] for v in cyc]))
        if len(out) > cap:
            raise CapExceeded(f"system has more than {cap} bounded traces")

    stems = [()]
    frontier = [(v,) for v in sorted(ts.initial)]
    for _ in range(params.stem_bound):
        stems.extend(frontier)
        frontier = [p + (n,) for p in frontier for n in succ[p[-1]]]
    for stem in stems:
        starts = sorted(ts.initial) if not stem else succ[stem[-1]]
        for c0 in starts:
            for cyc in cycles_from(c0):
                add(stem, cyc)
    return TraceSet(ts.ap, out)


# -- JSON -------------------------------------------------------------------


def _load(obj):
    if isinstance(obj, (str, os.PathLike)):
        with open(obj, encoding="utf-8") as fh:
            return json.load(fh)
    return obj


def trace_set_from_json(obj):
    obj = _load(obj)
    ap = obj["ap"]
    return TraceSet(ap, [LassoTrace(ap, t.get("stem", []), t["loop"]) for t in obj["traces"]])


def trace_set_to_json(T):
    return T.to_json()


def system_from_json(obj):
    obj = _load(obj)
    return TransitionSystem(obj["ap"], obj["vertices"], obj["edges"], obj["initial"],
                            {v: obj.get("labels", {}).get(v, []) for v in obj["vertices"]})


def system_to_json(ts):
    return {"ap": sorted(ts.ap), "vertices": list(ts.vertices), "edges": sorted(map(list, ts.edges)),
            "initial": sorted(ts.initial), "labels": {v: sorted(l) for v, l in ts.labels}}
