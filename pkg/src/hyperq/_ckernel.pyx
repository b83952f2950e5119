# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled lasso bitmask kernel for structures of at most 64 positions.

Mirrors hyperq._pykernel.run instruction for instruction.
"""
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

DEF LOAD = 0
DEF CONST = 1
DEF NOT = 2
DEF OR = 3
DEF AND = 4
DEF NEXT = 5
DEF EVENT = 6
DEF GLOB = 7
DEF UNTIL = 8


cdef inline uint64_t _next(uint64_t a, int S, int n) nogil:
    cdef uint64_t r = a >> 1
    if (a >> S) & 1:
        r |= (<uint64_t>1) << (n - 1)
    return r


cdef inline int _bitlen(uint64_t a) nogil:
    cdef int k = 0
    while a:
        a >>= 1
        k += 1
    return k


cdef inline uint64_t _full(int n) nogil:
    if n >= 64:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return ((<uint64_t>1) << n) - 1


cdef inline uint64_t _eventually(uint64_t a, int S, int n) nogil:
    cdef int k
    if S < 64 and (a >> S):
        return _full(n)
    k = _bitlen(a)
    return _full(k)


cdef inline uint64_t _until(uint64_t a, uint64_t b, int S, int n) nogil:
    cdef uint64_t r = b
    cdef uint64_t r2
    while True:
        r2 = b | (a & _next(r, S, n))
        if r2 == r:
            return r
        r = r2


def run(ops, xs, ys, atoms, int S, int n):
    cdef Py_ssize_t m = len(ops)
    cdef Py_ssize_t k
    cdef int op, x
    cdef uint64_t v
    cdef uint64_t full = _full(n)
    cdef uint64_t *regs
    cdef Py_ssize_t na = len(atoms)
    cdef uint64_t *at
    cdef const int[:] ops_v = ops
    cdef const int[:] xs_v = xs
    cdef const int[:] ys_v = ys
    if n > 64:
        raise ValueError("compiled kernel handles at most 64 positions")
    regs = <uint64_t *> malloc((m + 1) * sizeof(uint64_t))
    at = <uint64_t *> malloc((na + 1) * sizeof(uint64_t))
    if regs == NULL or at == NULL:
        free(regs)
        free(at)
        raise MemoryError()
    try:
        for k in range(na):
            at[k] = <uint64_t> atoms[k]
        with nogil:
            for k in range(m):
                op = ops_v[k]
                x = xs_v[k]
                if op == LOAD:
                    v = at[x]
                elif op == CONST:
                    v = full if x else 0
                elif op == NOT:
                    v = full ^ regs[x]
                elif op == OR:
                    v = regs[x] | regs[ys_v[k]]
                elif op == AND:
                    v = regs[x] & regs[ys_v[k]]
                elif op == NEXT:
                    v = _next(regs[x], S, n)
                elif op == EVENT:
                    v = _eventually(regs[x], S, n)
                elif op == GLOB:
                    v = full ^ _eventually(full ^ regs[x], S, n)
                else:
                    v = _until(regs[x], regs[ys_v[k]], S, n)
                regs[k] = v
        return regs[m - 1]
    finally:
        free(regs)
        free(at)
