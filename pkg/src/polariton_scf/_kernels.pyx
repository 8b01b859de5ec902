# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled determinant kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


cdef inline int _popcount(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline Py_ssize_t _find(const int64_t[::1] dets, int64_t key) nogil:
    cdef Py_ssize_t lo = 0, hi = dets.shape[0] - 1, mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if dets[mid] < key:
            lo = mid + 1
        elif dets[mid] > key:
            hi = mid - 1
        else:
            return mid
    return -1


def single_excitations(dets, p_list, q_list):
    cdef const int64_t[::1] d = np.ascontiguousarray(dets, dtype=np.int64)
    cdef const int64_t[::1] ps = np.ascontiguousarray(p_list, dtype=np.int64)
    cdef const int64_t[::1] qs = np.ascontiguousarray(q_list, dtype=np.int64)
    cdef Py_ssize_t n = d.shape[0], npair = ps.shape[0]
    cdef Py_ssize_t cap = n * npair
    src_a = np.empty(cap, dtype=np.int64)
    dst_a = np.empty(cap, dtype=np.int64)
    pair_a = np.empty(cap, dtype=np.int64)
    sign_a = np.empty(cap, dtype=np.int64)
    cdef int64_t[::1] src = src_a, dst = dst_a, pair = pair_a, sign = sign_a
    cdef Py_ssize_t k, m, cnt = 0, j
    cdef uint64_t det, between, mask_hi, mask_lo, new
    cdef int64_t p, q, lo, hi
    with nogil:
        for k in range(n):
            det = <uint64_t>d[k]
            for m in range(npair):
                p = ps[m]
                q = qs[m]
                if not (det >> q) & 1:
                    continue
                if p == q:
                    src[cnt] = k
                    dst[cnt] = k
                    pair[cnt] = m
                    sign[cnt] = 1
                    cnt += 1
                    continue
                if (det >> p) & 1:
                    continue
                if p < q:
                    lo = p
                    hi = q
                else:
                    lo = q
                    hi = p
                mask_hi = ((<uint64_t>1) << hi) - 1
                mask_lo = ((<uint64_t>1) << (lo + 1)) - 1
                between = det & (mask_hi ^ mask_lo)
                new = det ^ ((<uint64_t>1) << q) ^ ((<uint64_t>1) << p)
                j = _find(d, <int64_t>new)
                if j < 0:
                    with gil:
                        raise KeyError(f"determinant {new} not in basis")
                src[cnt] = k
                dst[cnt] = j
                pair[cnt] = m
                sign[cnt] = -1 if (_popcount(between) & 1) else 1
                cnt += 1
    return src_a[:cnt].copy(), dst_a[:cnt].copy(), pair_a[:cnt].copy(), sign_a[:cnt].copy()


def occupation_matrix(dets, Py_ssize_t n_orbitals):
    cdef const int64_t[::1] d = np.ascontiguousarray(dets, dtype=np.int64)
    cdef Py_ssize_t n = d.shape[0], k, p
    out_a = np.zeros((n, n_orbitals), dtype=np.int8)
    cdef cnp.int8_t[:, ::1] out = out_a
    with nogil:
        for k in range(n):
            for p in range(n_orbitals):
                out[k, p] = (d[k] >> p) & 1
    return out_a
