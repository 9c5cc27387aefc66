# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``; same signatures and results."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint8_t, uint64_t, int64_t
from libc.string cimport memcpy

cnp.import_array()

NAME = "native"
MAX_MASK_N = 64


def fanout(left_idx, blocks):
    cdef const uint8_t[:, ::1] li = np.ascontiguousarray(left_idx, dtype=np.uint8)
    cdef const uint8_t[:, ::1] bl = np.ascontiguousarray(blocks, dtype=np.uint8)
    cdef Py_ssize_t rows = li.shape[0], width = li.shape[1], blen = bl.shape[1]
    out = np.empty((rows, width * blen), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    cdef Py_ssize_t r, p
    if rows == 0 or blen == 0:
        return out
    with nogil:
        for r in range(rows):
            for p in range(width):
                memcpy(&o[r, p * blen], &bl[li[r, p], 0], blen)
    return out


def batch_compose(tables, va, vb):
    cdef const uint8_t[:, :, ::1] t = np.ascontiguousarray(tables, dtype=np.uint8)
    cdef const uint8_t[:, ::1] a = np.ascontiguousarray(va, dtype=np.uint8)
    cdef const uint8_t[:, ::1] b = np.ascontiguousarray(vb, dtype=np.uint8)
    cdef Py_ssize_t ns = t.shape[0], la = a.shape[1], lb = b.shape[1]
    out = np.empty((ns, la * lb), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    cdef Py_ssize_t s, p, q, base
    cdef uint8_t x
    with nogil:
        for s in range(ns):
            for p in range(la):
                x = a[s, p]
                base = p * lb
                for q in range(lb):
                    o[s, base + q] = t[s, x, b[s, q]]
    return out


def max_pair_agreement(vectors):
    cdef const uint8_t[:, ::1] v = np.ascontiguousarray(vectors, dtype=np.uint8)
    cdef Py_ssize_t m = v.shape[0], length = v.shape[1], i, j, c
    cdef int64_t best = -1, agree
    cdef Py_ssize_t bi = -1, bj = -1
    with nogil:
        for i in range(m - 1):
            for j in range(i + 1, m):
                agree = 0
                for c in range(length):
                    if v[i, c] == v[j, c]:
                        agree += 1
                if agree > best:
                    best = agree
                    bi = i
                    bj = j
    return int(best), int(bi), int(bj)


def batch_max_agreement(vectors):
    cdef const uint8_t[:, :, ::1] v = np.ascontiguousarray(vectors, dtype=np.uint8)
    cdef Py_ssize_t nt = v.shape[0], m = v.shape[1], length = v.shape[2]
    out = np.full(nt, -1, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t s, i, j, c
    cdef int64_t agree, best
    with nogil:
        for s in range(nt):
            best = -1
            for i in range(m - 1):
                for j in range(i + 1, m):
                    agree = 0
                    for c in range(length):
                        if v[s, i, c] == v[s, j, c]:
                            agree += 1
                    if agree > best:
                        best = agree
            o[s] = best
    return out


cdef inline uint64_t _prod(const uint64_t[:, ::1] cell, Py_ssize_t n,
                           uint64_t left, uint64_t right) noexcept nogil:
    cdef uint64_t out = 0
    cdef Py_ssize_t a, b
    for a in range(n):
        if (left >> a) & 1:
            for b in range(n):
                if (right >> b) & 1:
                    out |= cell[a, b]
    return out


def _cells(table):
    t = np.asarray(table, dtype=np.uint64)
    n = t.shape[0]
    if n > MAX_MASK_N:
        raise ValueError(f"value-set kernels support n <= {MAX_MASK_N}")
    return np.ascontiguousarray(np.left_shift(np.uint64(1), t), dtype=np.uint64)


def prefix_value_masks(word, table):
    cdef const uint64_t[:, ::1] cell = _cells(table)
    cdef Py_ssize_t n = cell.shape[0]
    w = np.ascontiguousarray(word, dtype=np.int64)
    cdef const int64_t[::1] wv = w
    cdef Py_ssize_t length = wv.shape[0], i, j, m, width
    span_arr = np.zeros((length, length), dtype=np.uint64)
    cdef uint64_t[:, ::1] span = span_arr
    cdef uint64_t acc
    with nogil:
        for i in range(length):
            span[i, i] = (<uint64_t>1) << wv[i]
        for width in range(1, length):
            for i in range(length - width):
                j = i + width
                acc = 0
                for m in range(i, j):
                    acc |= _prod(cell, n, span[i, m], span[m + 1, j])
                span[i, j] = acc
    return [int(x) for x in span_arr[0]]


def automaton_closure(init, table):
    cdef const uint64_t[:, ::1] cell = _cells(table)
    cdef Py_ssize_t n = cell.shape[0]
    v_arr = np.ascontiguousarray(np.array(init, dtype=np.uint64).reshape(len(init), len(init)))
    cdef uint64_t[:, ::1] v = v_arr
    cdef Py_ssize_t size = v.shape[0], s, m, t
    cdef bint changed = True
    cdef uint64_t new
    with nogil:
        while changed:
            changed = False
            for s in range(size):
                for m in range(size):
                    if v[s, m] == 0:
                        continue
                    for t in range(size):
                        if v[m, t] != 0:
                            new = v[s, t] | _prod(cell, n, v[s, m], v[m, t])
                            if new != v[s, t]:
                                v[s, t] = new
                                changed = True
    return [[int(x) for x in row] for row in v_arr]
