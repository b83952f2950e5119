"""Bounded arithmetic of orders one to three, Cantor pairing and set encodings of traces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from hyperq.formula import (
    And, ArithQ, Const, Eq, Formula, FreshNames, Iff, Implies, Less, Logic, Member, Not, Or,
    Plus, Times, arith_free_vars,
)

PAIR_LIMIT = 2 ** 64


def cantor_pair(i, j):
    if i < 0 or j < 0:
        raise ValueError("pairing is defined on naturals")
    n = (i + j) * (i + j + 1) // 2 + j
    if n >= PAIR_LIMIT:
        raise OverflowError(f"pair({i}, {j}) exceeds 2**64")
    return n


def cantor_unpair(n):
    if n < 0:
        raise ValueError("pairing is defined on naturals")
    w = (math.isqrt(8 * n + 1) - 1) // 2
    j = n - w * (w + 1) // 2
    return w - j, j


@dataclass(frozen=True)
class EncodedTrace:
    set: frozenset


def encode_trace(t, prop_index, horizon):
    if len(set(prop_index.values())) != len(prop_index):
        raise ValueError("proposition index must be injective")
    out = set()
    for i in range(horizon):
        for p in t.value_at(i):
            if p in prop_index:
                out.add(cantor_pair(i, prop_index[p]))
    return EncodedTrace(frozenset(out))


def decode_trace(e, prop_index, horizon):
    """The prefix of length ``horizon`` encoded by ``e`` (a list of letters)."""
    return [frozenset(p for p, k in prop_index.items() if cantor_pair(i, k) in e.set)
            for i in range(horizon)]


def prefix_of(t, horizon, props=None):
    props = t.ap if props is None else frozenset(props)
    return [t.value_at(i) & props for i in range(horizon)]


# -- bounded evaluation -----------------------------------------------------


@dataclass(frozen=True)
class BoundedDomain:
    N: int
    third_order_cap: int = 4

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("domain size must be at least 1")


@dataclass
class ArithAssignment:
    first: dict = field(default_factory=dict)
    second: dict = field(default_factory=dict)
    third: dict = field(default_factory=dict)


class ArithError(ValueError):
    pass


def _set_mask(s, N, what):
    m = 0
    for v in s:
        if not 0 <= v < N:
            raise ArithError(f"{what} element {v} outside 0..{N - 1}")
        m |= 1 << v
    return m


def set_of_mask(m):
    return frozenset(i for i in range(m.bit_length()) if (m >> i) & 1)


def eval_arith(f, d, a=None):
    """Truth of ``f`` with quantifiers ranging over the bounded domain ``d``.

    Sums and products are compared as exact integers.
    """
    a = a or ArithAssignment()
    root = f.root if isinstance(f, Formula) else f
    N = d.N
    env = dict(a.first)
    for k, v in a.second.items():
        env[k] = _set_mask(v, N, "set")
    for k, v in a.third.items():
        env[k] = _set_mask((_set_mask(s, N, "set") for s in v), 2 ** N, "family")
    missing = arith_free_vars(root) - set(env)
    if missing:
        raise ArithError(f"unbound variables {sorted(missing)}")
    ranges = {1: N, 2: 2 ** N}

    def rng(order):
        if order == 3:
            if N > d.third_order_cap:
                raise ArithError(f"third-order enumeration over N={N} exceeds cap {d.third_order_cap}")
            return 2 ** (2 ** N)
        return ranges[order]

    def ev(n, env):
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
            return bool((env[n.container] >> env[n.elem]) & 1)
        if isinstance(n, Not):
            return not ev(n.arg, env)
        if isinstance(n, Or):
            return ev(n.left, env) or ev(n.right, env)
        if isinstance(n, And):
            return ev(n.left, env) and ev(n.right, env)
        if isinstance(n, Implies):
            return (not ev(n.left, env)) or ev(n.right, env)
        if isinstance(n, Iff):
            return ev(n.left, env) == ev(n.right, env)
        if isinstance(n, ArithQ):
            vals = range(rng(n.order))
            body = n.body
            if n.exists:
                return any(ev(body, {**env, n.var: v}) for v in vals)
            return all(ev(body, {**env, n.var: v}) for v in vals)
        raise ArithError(f"not an arithmetic node: {type(n).__name__}")

    return ev(root, env)


def is_sigma21(f):
    """Third-order quantifiers are existential and form the outermost block."""
    n = f.root if isinstance(f, Formula) else f
    while isinstance(n, ArithQ) and n.order == 3:
        if not n.exists:
            return False
        n = n.body
    stack = [n]
    while stack:
        m = stack.pop()
        if isinstance(m, ArithQ) and m.order == 3:
            return False
        if isinstance(m, ArithQ):
            stack.append(m.body)
        elif isinstance(m, Not):
            stack.append(m.arg)
        elif isinstance(m, (Or, And, Implies, Iff)):
            stack.extend((m.left, m.right))
    return True


# -- theta_{=n} ---------------------------------------------------------------


def successor(z, x, fresh):
    """``z + 1 = x`` using only ``<``."""
    w = fresh("w")
    return And(Less(z, x), Not(ArithQ(True, 1, w, And(Less(z, w), Less(w, x)))))


def build_theta_eq_n(n, var="x", fresh=None):
    """First-order formula with free ``var`` that holds exactly for ``var = n``.

    Built by binary expansion, so its size grows with log n: an even ``n``
    halves through ``y + y = x``, an odd ``n`` steps down through successor.
    """
    if n < 0:
        raise ValueError("n must be a natural number")
    fresh = fresh or FreshNames({var})

    def go(k, x):
        if k == 0:
            return Plus(x, x, x)
        y = fresh("y")
        if k % 2:
            return ArithQ(True, 1, y, And(successor(y, x, fresh), go(k - 1, y)))
        return ArithQ(True, 1, y, And(Plus(y, y, x), go(k // 2, y)))

    return Formula(Logic.ARITH, go(n, var))

