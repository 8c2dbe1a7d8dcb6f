# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled edge-reversal kernels. Same contract as ``_pykernels``."""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.stdlib cimport llabs

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF OK = 0
DEF OVERFLOW = 1
DEF NO_PERIOD = 2
DEF NOT_CONVERGED = 3
DEF ZERO_WINDOW = 4


cdef int _step(const int[:] indptr, const int[:] indices, const int[:] pred, const int[:] succ,
               int[:] lev, int[:] occ, long long[:] mark, long long stamp, int B, bint advance,
               int[:] sinks, int* nsinks, int* delivered, int* empty) noexcept nogil:
    cdef Py_ssize_t n = lev.shape[0]
    cdef Py_ssize_t i, e, m = 0, a
    cdef int p, s, k
    for i in range(n):
        if lev[i] == 1:
            sinks[m] = <int>i
            m += 1
    nsinks[0] = <int>m
    delivered[0] = 0
    empty[0] = 0
    for a in range(m):
        i = sinks[a]
        p = pred[i]
        if p < 0 or occ[i] > 0:
            if p >= 0:
                occ[i] -= 1
            s = succ[i]
            if s >= 0:
                if occ[s] >= B:
                    return OVERFLOW
                occ[s] += 1
            else:
                delivered[0] += 1
        else:
            empty[0] += 1
    for i in range(n):
        lev[i] -= 1
    for a in range(m):
        i = sinks[a]
        if not advance:
            k = 0
            for e in range(indptr[i], indptr[i + 1]):
                if lev[indices[e]] > k:
                    k = lev[indices[e]]
            lev[i] = k + 1
            continue
        stamp += 1
        for e in range(indptr[i], indptr[i + 1]):
            mark[lev[indices[e]]] = stamp
        p = pred[i]
        s = succ[i]
        k = 1
        while True:
            if mark[k] != stamp:
                if (p < 0 or k > lev[p] or occ[i] >= 1) and (s < 0 or k > lev[s] or occ[s] <= B - 1):
                    break
            k += 1
        lev[i] = k
    return OK


def _i32(x):
    return np.ascontiguousarray(x, dtype=np.int32)


def step(indptr, indices, pred, succ, lev, occ, int B, bint advance):
    """Single step; ``lev`` and ``occ`` must be writable int32 arrays."""
    cdef Py_ssize_t n = len(lev)
    cdef int[:] lv = lev
    cdef int[:] oc = occ
    cdef int[:] sinks = np.empty(n, dtype=np.int32)
    cdef long long[:] mark = np.zeros(n + 2, dtype=np.int64)
    cdef int ns = 0, d = 0, em = 0
    status = _step(_i32(indptr), _i32(indices), _i32(pred), _i32(succ), lv, oc, mark, 0, B, advance,
                   sinks, &ns, &d, &em)
    return status, [int(sinks[a]) for a in range(ns)], d, em


def run_period(indptr, indices, pred, succ, lev0, occ0, int B, bint advance,
               bint fingerprint_buffers, long long max_iters):
    cdef Py_ssize_t n = len(lev0)
    state = np.empty(2 * n, dtype=np.int32)
    state[:n] = lev0
    state[n:] = occ0
    cdef int[:] st = state
    cdef int[:] lev = state[:n]
    cdef int[:] occ = state[n:]
    cdef const int[:] ip = _i32(indptr)
    cdef const int[:] ix = _i32(indices)
    cdef const int[:] pr = _i32(pred)
    cdef const int[:] sc = _i32(succ)
    cdef int[:] sinks = np.empty(n, dtype=np.int32)
    cdef long long[:] mark = np.zeros(n + 2, dtype=np.int64)
    cdef long long stamp = 0
    cdef int ns = 0, d = 0, em = 0, status
    cdef long long t
    cdef Py_ssize_t nbytes = (2 * n if fingerprint_buffers else n) * sizeof(int)
    seen = {}
    hist_sinks = []
    hist_del = []
    hist_empty = []
    for t in range(max_iters + 1):
        key = PyBytes_FromStringAndSize(<char*>&st[0], nbytes) if n > 0 else b""
        first = seen.get(key)
        if first is not None:
            return OK, first, t - first, t, hist_sinks, hist_del, hist_empty
        seen[key] = t
        if t == max_iters:
            break
        with nogil:
            status = _step(ip, ix, pr, sc, lev, occ, mark, stamp, B, advance, sinks, &ns, &d, &em)
        stamp += n
        hist_sinks.append(tuple([sinks[a] for a in range(ns)]))
        hist_del.append(d)
        hist_empty.append(em)
        if status != OK:
            return status, -1, 0, t + 1, hist_sinks, hist_del, hist_empty
    return NO_PERIOD, -1, 0, max_iters, hist_sinks, hist_del, hist_empty


def run_estimate(indptr, indices, pred, succ, terminal, lev0, occ0, int B, bint advance,
                 long long w, double tol, long long t_max, long long grace):
    cdef Py_ssize_t n = len(lev0)
    cdef int[:] lev = np.array(lev0, dtype=np.int32)
    cdef int[:] occ = np.array(occ0, dtype=np.int32)
    cdef const int[:] ip = _i32(indptr)
    cdef const int[:] ix = _i32(indices)
    cdef const int[:] pr = _i32(pred)
    cdef const int[:] sc = _i32(succ)
    cdef const unsigned char[:] term = np.ascontiguousarray(terminal, dtype=np.uint8)
    cdef int[:] sinks = np.empty(n, dtype=np.int32)
    cdef long long[:] mark = np.zeros(n + 2, dtype=np.int64)
    cdef long long[:] ring = np.zeros(w + 1, dtype=np.int64)
    cdef long long stamp = 0, total = 0, prev, diff, t
    cdef int ns = 0, d = 0, em = 0, status = OK
    cdef Py_ssize_t i
    with nogil:
        for t in range(t_max + 1):
            for i in range(n):
                if lev[i] == 1 and term[i]:
                    total += 1
            ring[t % (w + 1)] = total
            if t >= w:
                prev = ring[(t - w) % (w + 1)]
                if prev > 0:
                    diff = llabs(total * (t - w + 1) - prev * (t + 1))
                    if <double>diff <= tol * <double>prev * <double>(t + 1):
                        status = OK
                        break
                elif t >= w + grace:
                    status = ZERO_WINDOW
                    break
            if t == t_max:
                status = NOT_CONVERGED
                break
            status = _step(ip, ix, pr, sc, lev, occ, mark, stamp, B, advance, sinks, &ns, &d, &em)
            stamp += n
            if status != OK:
                break
    return status, total, t
