# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core; contracts documented in macwtap._core."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def joint_wfz(double[::1] p1, double[::1] p2,
              cnp.int64_t[::1] w1, cnp.int64_t[::1] f1,
              cnp.int64_t[::1] w2, cnp.int64_t[::1] f2,
              Py_ssize_t W1, Py_ssize_t W2, Py_ssize_t F1, Py_ssize_t F2,
              unsigned char[:, ::1] d1, unsigned char[:, ::1] d2,
              double[:, :, :, ::1] letters, cnp.int64_t[::1] zsizes):
    cdef Py_ssize_t M1 = p1.shape[0]
    cdef Py_ssize_t M2 = p2.shape[0]
    cdef Py_ssize_t n = zsizes.shape[0]
    cdef Py_ssize_t zsize = 1
    cdef Py_ssize_t i
    for i in range(n):
        zsize *= zsizes[i]
    out_np = np.zeros(W1 * W2 * F1 * F2 * zsize, dtype=np.float64)
    cdef double[::1] out = out_np
    zbuf_np = np.empty(zsize, dtype=np.float64)
    cdef double[::1] zbuf = zbuf_np

    cdef Py_ssize_t m1, m2, t, k, cur, base, zi, a, b
    cdef double weight, val
    with nogil:
        for m1 in range(M1):
            for m2 in range(M2):
                weight = p1[m1] * p2[m2]
                if weight == 0.0:
                    continue
                zbuf[0] = weight
                cur = 1
                for i in range(n):
                    zi = zsizes[i]
                    a = d1[m1, i]
                    b = d2[m2, i]
                    if zi == 1:
                        val = letters[i, a, b, 0]
                        if val != 1.0:
                            for t in range(cur):
                                zbuf[t] *= val
                    else:
                        # downward so writes never clobber unread slots
                        for t in range(cur - 1, -1, -1):
                            val = zbuf[t]
                            for k in range(zi):
                                zbuf[t * zi + k] = val * letters[i, a, b, k]
                        cur *= zi
                base = (((w1[m1] * W2 + w2[m2]) * F1 + f1[m1]) * F2 + f2[m2]) * zsize
                for t in range(zsize):
                    out[base + t] += zbuf[t]
    return out_np


def pair_loglik(unsigned char[:, ::1] d1, unsigned char[:, ::1] d2,
                double[:, :, ::1] ylog):
    cdef Py_ssize_t M1 = d1.shape[0]
    cdef Py_ssize_t M2 = d2.shape[0]
    cdef Py_ssize_t n = d1.shape[1]
    out_np = np.zeros((M1, M2), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t m1, m2, i
    cdef double s
    with nogil:
        for m1 in range(M1):
            for m2 in range(M2):
                s = 0.0
                for i in range(n):
                    s += ylog[i, d1[m1, i], d2[m2, i]]
                out[m1, m2] = s
    return out_np
