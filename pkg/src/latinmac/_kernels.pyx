# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def collided_flags(slot, channel, tx_id, tx_x, tx_y, rx_x, rx_y, double radius):
    cdef Py_ssize_t n = len(slot)
    out_arr = np.zeros(n, dtype=np.uint8)
    if n < 2:
        return out_arr
    order_arr = np.lexsort((channel, slot)).astype(np.int64)
    cdef long long[::1] order = order_arr
    cdef long long[::1] s = np.ascontiguousarray(slot, dtype=np.int64)
    cdef long long[::1] c = np.ascontiguousarray(channel, dtype=np.int64)
    cdef long long[::1] tid = np.ascontiguousarray(tx_id, dtype=np.int64)
    cdef double[::1] tx = np.ascontiguousarray(tx_x, dtype=np.float64)
    cdef double[::1] ty = np.ascontiguousarray(tx_y, dtype=np.float64)
    cdef double[::1] rx = np.ascontiguousarray(rx_x, dtype=np.float64)
    cdef double[::1] ry = np.ascontiguousarray(rx_y, dtype=np.float64)
    cdef unsigned char[::1] out = out_arr
    cdef double r2 = radius * radius
    cdef Py_ssize_t a = 0, b, i, j
    cdef long long ei, ej
    cdef double dx, dy
    while a < n:
        b = a + 1
        while b < n and s[order[b]] == s[order[a]] and c[order[b]] == c[order[a]]:
            b += 1
        if b - a > 1:
            for i in range(a, b):
                ei = order[i]
                for j in range(a, b):
                    ej = order[j]
                    if tid[ei] == tid[ej]:
                        continue
                    dx = rx[ei] - tx[ej]
                    dy = ry[ei] - ty[ej]
                    if dx * dx + dy * dy <= r2:
                        out[ei] = 1
                        break
        a = b
    return out_arr


def dail_oracle_successes(act_u, pick_u, chan_u, double p_slot, long long n_patterns,
                          long long n_same, long long n_channels):
    cdef double[:, ::1] A = np.ascontiguousarray(act_u, dtype=np.float64)
    cdef double[:, ::1] P = np.ascontiguousarray(pick_u, dtype=np.float64)
    cdef double[:, ::1] C = np.ascontiguousarray(chan_u, dtype=np.float64)
    cdef Py_ssize_t T = A.shape[0], O = A.shape[1]
    if O == 0:
        return T
    wpos_arr = np.empty(O, dtype=np.int64)
    wval_arr = np.empty(O, dtype=np.int64)
    cdef long long[::1] wpos = wpos_arr
    cdef long long[::1] wval = wval_arr
    cdef Py_ssize_t t, j, k, x
    cdef long long r, sel, cur, successes = 0
    cdef bint hit
    for t in range(T):
        x = 0
        for j in range(O):
            if A[t, j] < p_slot:
                x += 1
        hit = False
        for j in range(x):
            r = j + <long long>floor(P[t, j] * (n_patterns - j))
            sel = r
            cur = j
            for k in range(j):
                if wpos[k] == r:
                    sel = wval[k]
                if wpos[k] == j:
                    cur = wval[k]
            wpos[j] = r
            wval[j] = cur
            if sel >= n_same and <long long>floor(C[t, j] * n_channels) == 0:
                hit = True
                break
        if not hit:
            successes += 1
    return successes
