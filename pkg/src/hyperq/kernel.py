"""Backend selection and compilation of quantifier-free formulas to kernel programs.

The compiled extension (``hyperq._ckernel``) is used when it was built and the
lasso structure has at most 64 positions; otherwise the pure-Python kernel
runs.  Set ``HYPERQ_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os
from array import array
from dataclasses import dataclass

from hyperq import _pykernel
from hyperq._pykernel import AND, CONST, EVENT, GLOB, LOAD, NEXT, NOT, OR, UNTIL
from hyperq.formula import (
    And, Atom, AxiomPlusTimes, Const, Eventually, Globally, Iff, Implies, Next, Not, Or,
    PAtom, Until,
)

try:
    if os.environ.get("HYPERQ_PURE"):
        raise ImportError("pure mode requested")
    from hyperq import _ckernel
except ImportError:  # extension not built
    _ckernel = None

BACKEND = "cython" if _ckernel is not None else "python"

op_next = _pykernel.op_next
op_eventually = _pykernel.op_eventually
op_globally = _pykernel.op_globally
op_until = _pykernel.op_until


@dataclass(frozen=True)
class Program:
    ops: array
    xs: array
    ys: array
    leaves: tuple  # leaf keys in LOAD order

    def run(self, atoms, S, n, backend=None):
        backend = backend or BACKEND
        if backend == "cython" and _ckernel is not None and n <= 64:
            return _ckernel.run(self.ops, self.xs, self.ys, atoms, S, n)
        return _pykernel.run(self.ops, self.xs, self.ys, atoms, S, n)


def leaf_key(node):
    """Key under which the evaluator supplies a leaf's bitmask."""
    if isinstance(node, Atom):
        return ("t", node.var, node.prop)
    if isinstance(node, PAtom):
        return ("p", node.prop)
    if isinstance(node, AxiomPlusTimes):
        return ("axiom",)
    raise TypeError(node)


def compile_qf(node):
    """Compile a quantifier-free formula; shared subterms get one register."""
    ops, xs, ys = array("i"), array("i"), array("i")
    leaves = []
    leaf_index = {}
    memo = {}

    def emit(op, x, y=0):
        ops.append(op)
        xs.append(x)
        ys.append(y)
        return len(ops) - 1

    def go(n):
        if n in memo:
            return memo[n]
        if isinstance(n, Const):
            r = emit(CONST, 1 if n.value else 0)
        elif isinstance(n, (Atom, PAtom, AxiomPlusTimes)):
            key = leaf_key(n)
            if key not in leaf_index:
                leaf_index[key] = len(leaves)
                leaves.append(key)
            r = emit(LOAD, leaf_index[key])
        elif isinstance(n, Not):
            r = emit(NOT, go(n.arg))
        elif isinstance(n, Or):
            r = emit(OR, go(n.left), go(n.right))
        elif isinstance(n, And):
            r = emit(AND, go(n.left), go(n.right))
        elif isinstance(n, Implies):
            r = emit(OR, emit(NOT, go(n.left)), go(n.right))
        elif isinstance(n, Iff):
            a, b = go(n.left), go(n.right)
            r = emit(NOT, emit(OR, emit(AND, a, emit(NOT, b)), emit(AND, b, emit(NOT, a))))
        elif isinstance(n, Next):
            r = emit(NEXT, go(n.arg))
        elif isinstance(n, Eventually):
            r = emit(EVENT, go(n.arg))
        elif isinstance(n, Globally):
            r = emit(GLOB, go(n.arg))
        elif isinstance(n, Until):
            r = emit(UNTIL, go(n.left), go(n.right))
        else:
            raise TypeError(f"not quantifier-free: {type(n).__name__}")
        memo[n] = r
        return r

    go(node)
    return Program(ops, xs, ys, tuple(leaves))
