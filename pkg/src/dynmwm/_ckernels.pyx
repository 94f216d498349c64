# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of :mod:`dynmwm._pykernels` (same signatures, same results).

Weights must fit in int64 with room for their sum; the dispatcher in
:mod:`dynmwm.kernels` checks this before calling in.
"""

from libc.stdlib cimport malloc, calloc, free
from libc.stdint cimport int64_t, uint32_t

cdef extern from *:
    int __builtin_ctz(unsigned int x) nogil


def mwm_bitmask(int n, list edges):
    if n > 26:
        raise ValueError("bitmask kernel supports at most 26 vertices")
    cdef int i, j, k, top, pending
    cdef int64_t w, c, val, target
    cdef uint32_t full = (1u << n) - 1u if n > 0 else 0u
    cdef uint32_t mask, rest, bj, child
    # forward adjacency (j > i), sorted by j, in CSR form
    fwd = [[] for _ in range(n)]
    for e in edges:
        i, j, w = e
        if i > j:
            i, j = j, i
        fwd[i].append((j, w))
    cdef int m = sum(len(a) for a in fwd)
    cdef int* start = <int*> malloc((n + 1) * sizeof(int))
    cdef int* nbr = <int*> malloc((m + 1) * sizeof(int))
    cdef int64_t* wt = <int64_t*> malloc((m + 1) * sizeof(int64_t))
    # memo[mask] = best + 1, zero meaning unknown; calloc keeps untouched pages free
    cdef int64_t* memo = <int64_t*> calloc(<size_t> full + 1, sizeof(int64_t))
    cdef uint32_t* stack = <uint32_t*> malloc((2 * n + 2) * (<size_t> (n + 2)) * sizeof(uint32_t))
    if start == NULL or nbr == NULL or wt == NULL or memo == NULL or stack == NULL:
        free(start); free(nbr); free(wt); free(memo); free(stack)
        raise MemoryError()
    mate = [-1] * n
    try:
        k = 0
        for i in range(n):
            start[i] = k
            for j, w in sorted(fwd[i]):
                nbr[k] = j
                wt[k] = w
                k += 1
        start[n] = k
        memo[0] = 1
        with nogil:
            top = 0
            stack[top] = full
            top += 1
            while top > 0:
                mask = stack[top - 1]
                if memo[mask] != 0:
                    top -= 1
                    continue
                i = __builtin_ctz(mask)
                rest = mask & (mask - 1u)
                pending = 0
                if memo[rest] == 0:
                    stack[top] = rest
                    top += 1
                    pending = 1
                for k in range(start[i], start[i + 1]):
                    bj = 1u << nbr[k]
                    if rest & bj:
                        child = rest ^ bj
                        if memo[child] == 0:
                            stack[top] = child
                            top += 1
                            pending = 1
                if pending:
                    continue
                top -= 1
                val = memo[rest] - 1
                for k in range(start[i], start[i + 1]):
                    bj = 1u << nbr[k]
                    if rest & bj:
                        c = wt[k] + memo[rest ^ bj] - 1
                        if c > val:
                            val = c
                memo[mask] = val + 1
        opt = memo[full] - 1
        mask = full
        while mask:
            i = __builtin_ctz(mask)
            rest = mask & (mask - 1u)
            target = memo[mask] - 1
            mask = rest
            for k in range(start[i], start[i + 1]):
                bj = 1u << nbr[k]
                if (rest & bj) and memo[rest ^ bj] != 0 and wt[k] + memo[rest ^ bj] - 1 == target:
                    j = nbr[k]
                    mate[i] = j
                    mate[j] = i
                    mask = rest ^ bj
                    break
        return opt, mate
    finally:
        free(start); free(nbr); free(wt); free(memo); free(stack)


cdef int64_t _path_value(int64_t* w, signed char* st, int lo, int hi) nogil:
    cdef int64_t out_v = 0, in_v = -1, prev_best, new_in, new_out
    cdef int i
    for i in range(lo, hi):
        prev_best = out_v if out_v > in_v else in_v
        new_in = -1
        if st[i] != 0 and out_v >= 0:
            new_in = out_v + w[i]
        new_out = prev_best if st[i] != 1 else -1
        out_v = new_out
        in_v = new_in
    return out_v if out_v > in_v else in_v


cdef int64_t _pc_value(int64_t* w, signed char* st, int L, bint cycle) nogil:
    cdef int64_t best = -1, inner
    if L == 0:
        return 0
    if not cycle:
        return _path_value(w, st, 0, L)
    if st[0] != 1:
        best = _path_value(w, st, 1, L)
    if st[0] != 0 and st[1] != 1 and st[L - 1] != 1:
        inner = _path_value(w, st, 2, L - 1)
        if inner >= 0 and w[0] + inner > best:
            best = w[0] + inner
    return best


cdef class _Buffers:
    cdef int64_t* w
    cdef signed char* st
    cdef int L

    def __cinit__(self, list weights, list state):
        cdef int i
        self.L = len(weights)
        self.w = <int64_t*> malloc((self.L + 1) * sizeof(int64_t))
        self.st = <signed char*> malloc((self.L + 1) * sizeof(signed char))
        if self.w == NULL or self.st == NULL:
            raise MemoryError()
        for i in range(self.L):
            self.w[i] = weights[i]
            self.st[i] = state[i]

    def __dealloc__(self):
        free(self.w)
        free(self.st)


def path_cycle_value(list weights, bint cycle, list state):
    if cycle and 0 < len(weights) < 3:
        raise ValueError("a simple cycle has at least three edges")
    cdef _Buffers b = _Buffers(weights, state)
    return _pc_value(b.w, b.st, b.L, cycle)


def path_cycle_lexmin(list weights, bint cycle, list order):
    cdef int L = len(weights)
    if cycle and 0 < L < 3:
        raise ValueError("a simple cycle has at least three edges")
    cdef _Buffers b = _Buffers(weights, [-1] * L)
    cdef int64_t opt = _pc_value(b.w, b.st, L, cycle)
    cdef int idx, i
    for idx in order:
        b.st[idx] = 1
        if _pc_value(b.w, b.st, L, cycle) != opt:
            b.st[idx] = 0
    return opt, [i for i in range(L) if b.st[i] == 1]
