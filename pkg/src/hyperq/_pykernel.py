"""Pure-Python lasso bitmask kernel.

A quantifier-free formula is evaluated over the positions ``0..n-1`` of a lasso
structure whose loop starts at ``S``: position ``n-1`` is followed by ``S``.
Truth values of a subformula are packed into an int, bit ``i`` for position
``i``.  This module is the fallback for :mod:`hyperq._ckernel` and must stay
behaviourally identical to it.
"""

LOAD, CONST, NOT, OR, AND, NEXT, EVENT, GLOB, UNTIL = range(9)


def full_mask(n):
    return (1 << n) - 1


def op_next(a, S, n):
    r = a >> 1
    if (a >> S) & 1:
        r |= 1 << (n - 1)
    return r


def op_eventually(a, S, n):
    if a >> S:
        return (1 << n) - 1
    return (1 << a.bit_length()) - 1


def op_globally(a, S, n):
    full = (1 << n) - 1
    return full ^ op_eventually(full ^ a, S, n)


def op_until(a, b, S, n):
    r = b
    while True:
        nxt = op_next(r, S, n)
        r2 = b | (a & nxt)
        if r2 == r:
            return r
        r = r2


def run(ops, xs, ys, atoms, S, n):
    """Execute a compiled program; register ``k`` holds instruction ``k``'s value."""
    full = (1 << n) - 1
    regs = [0] * len(ops)
    for k in range(len(ops)):
        op = ops[k]
        x = xs[k]
        if op == LOAD:
            v = atoms[x]
        elif op == CONST:
            v = full if x else 0
        elif op == NOT:
            v = full ^ regs[x]
        elif op == OR:
            v = regs[x] | regs[ys[k]]
        elif op == AND:
            v = regs[x] & regs[ys[k]]
        elif op == NEXT:
            v = op_next(regs[x], S, n)
        elif op == EVENT:
            v = op_eventually(regs[x], S, n)
        elif op == GLOB:
            v = op_globally(regs[x], S, n)
        else:
            v = op_until(regs[x], regs[ys[k]], S, n)
        regs[k] = v
    return regs[-1]
