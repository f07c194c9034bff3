# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the condition residuals and joint amplitudes.

Call-compatible with ``_kernels_py``; inputs are contiguous complex128 arrays.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs, sqrt

cnp.import_array()

cdef double P_FLOOR = 1e-15
# witnesses go to the lowest index within TIE_TOL of the maximum
cdef double TIE_TOL = 1e-12


cdef inline double abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef void _joint(const double complex[:, ::1] u, const double complex[::1] a,
                 const double complex[::1] b, double complex[:, ::1] c) noexcept nogil:
    cdef Py_ssize_t d_s = a.shape[0], d_p = b.shape[0]
    cdef Py_ssize_t i, j, k, l, row
    cdef double complex acc, ak
    for i in range(d_s):
        for j in range(d_p):
            row = i * d_p + j
            acc = 0
            for k in range(d_s):
                ak = a[k]
                if ak == 0:
                    continue
                for l in range(d_p):
                    acc = acc + ak * b[l] * u[row, k * d_p + l]
            c[i, j] = acc


def joint_amplitudes(u, a, b):
    cdef const double complex[:, ::1] uv = np.ascontiguousarray(u, dtype=np.complex128)
    cdef const double complex[::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef const double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    out = np.empty((av.shape[0], bv.shape[0]), dtype=np.complex128)
    cdef double complex[:, ::1] cv = out
    with nogil:
        _joint(uv, av, bv, cv)
    return out


def weak_residual(u, a, b):
    cdef const double complex[:, ::1] uv = np.ascontiguousarray(u, dtype=np.complex128)
    cdef const double complex[::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef const double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    cdef Py_ssize_t d_s = av.shape[0], d_p = bv.shape[0]
    c = np.empty((d_s, d_p), dtype=np.complex128)
    cdef double complex[:, ::1] cv = c
    res = np.empty(d_s)
    cdef double[::1] rv = res
    cdef Py_ssize_t i, j, best_i = 0
    cdef double post, best = -1.0
    with nogil:
        _joint(uv, av, bv, cv)
        for i in range(d_s):
            post = 0.0
            for j in range(d_p):
                post += abs2(cv[i, j])
            rv[i] = fabs(post - abs2(av[i]))
            if rv[i] > best:
                best = rv[i]
        for i in range(d_s):
            if rv[i] >= best - TIE_TOL:
                best_i = i
                break
    return best, best_i


def moderate_residual(u, b, Py_ssize_t d_s):
    cdef const double complex[:, ::1] uv = np.ascontiguousarray(u, dtype=np.complex128)
    cdef const double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    cdef Py_ssize_t d_p = bv.shape[0]
    m = np.empty((d_s, d_p, d_s), dtype=np.complex128)
    cdef double complex[:, :, ::1] mv = m
    res = np.empty((d_s, d_s, d_s))
    cdef double[:, :, ::1] rv = res
    cdef Py_ssize_t i, j, k, k2, l, row
    cdef Py_ssize_t wi = 0, wk = 0, wk2 = 0
    cdef double complex acc, target
    cdef double best = -1.0
    cdef bint found = False
    with nogil:
        for i in range(d_s):
            for j in range(d_p):
                row = i * d_p + j
                for k in range(d_s):
                    acc = 0
                    for l in range(d_p):
                        acc = acc + uv[row, k * d_p + l] * bv[l]
                    mv[i, j, k] = acc
        for i in range(d_s):
            for k in range(d_s):
                for k2 in range(d_s):
                    acc = 0
                    for j in range(d_p):
                        acc = acc + mv[i, j, k].conjugate() * mv[i, j, k2]
                    target = 1.0 if (k == i and k2 == i) else 0.0
                    rv[i, k, k2] = sqrt(abs2(acc - target))
                    if rv[i, k, k2] > best:
                        best = rv[i, k, k2]
        # scan order (i, k, k2) fixes the tie-break of the witness
        for i in range(d_s):
            for k in range(d_s):
                for k2 in range(d_s):
                    if not found and rv[i, k, k2] >= best - TIE_TOL:
                        wi = i
                        wk = k
                        wk2 = k2
                        found = True
    return best, wk, wk2, wi


def mutual_information(p):
    cdef const double[:, ::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t n = pv.shape[0], m = pv.shape[1], i, j
    rows = np.zeros(n)
    cols = np.zeros(m)
    cdef double[::1] rv = rows
    cdef double[::1] cv = cols
    cdef double total = 0.0, x
    with nogil:
        for i in range(n):
            for j in range(m):
                rv[i] += pv[i, j]
                cv[j] += pv[i, j]
        for i in range(n):
            for j in range(m):
                x = pv[i, j]
                if x > P_FLOOR:
                    total += x * log(x / (rv[i] * cv[j]))
    return total
