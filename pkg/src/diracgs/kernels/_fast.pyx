# cython: language_level=3
"""Compiled twins of the kernels in ``_ref``.

Same signatures and semantics; plain C loops over the flattened mode or
grid axis with the 4 spinor components unrolled.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, pow

cnp.import_array()


def abs4(const double complex[:, ::1] u):
    cdef Py_ssize_t m = u.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double s
    cdef double complex z
    with nogil:
        for i in range(m):
            z = u[i, 0]
            s = z.real * z.real + z.imag * z.imag
            z = u[i, 1]
            s += z.real * z.real + z.imag * z.imag
            z = u[i, 2]
            s += z.real * z.real + z.imag * z.imag
            z = u[i, 3]
            s += z.real * z.real + z.imag * z.imag
            o[i] = sqrt(s)
    return out


def dirac_apply(const double complex[:, ::1] u,
                const double[::1] kx, const double[::1] ky,
                const double[::1] kz, double a):
    cdef Py_ssize_t m = u.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((m, 4), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t i
    cdef double complex u1, u2, u3, u4, km, kp
    with nogil:
        for i in range(m):
            u1 = u[i, 0]
            u2 = u[i, 1]
            u3 = u[i, 2]
            u4 = u[i, 3]
            km = kx[i] - 1j * ky[i]
            kp = kx[i] + 1j * ky[i]
            o[i, 0] = a * u1 + kz[i] * u3 + km * u4
            o[i, 1] = a * u2 + kp * u3 - kz[i] * u4
            o[i, 2] = kz[i] * u1 + km * u2 - a * u3
            o[i, 3] = kp * u1 - kz[i] * u2 - a * u4
    return out


def split_pm(const double complex[:, ::1] u,
             const double[::1] kx, const double[::1] ky,
             const double[::1] kz, const double[::1] lam, double a):
    cdef Py_ssize_t m = u.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] up = np.empty((m, 4), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] um = np.empty((m, 4), dtype=np.complex128)
    cdef double complex[:, ::1] p = up
    cdef double complex[:, ::1] q = um
    cdef Py_ssize_t i
    cdef double complex u1, u2, u3, u4, km, kp, d1, d2, d3, d4
    cdef double il
    with nogil:
        for i in range(m):
            u1 = u[i, 0]
            u2 = u[i, 1]
            u3 = u[i, 2]
            u4 = u[i, 3]
            km = kx[i] - 1j * ky[i]
            kp = kx[i] + 1j * ky[i]
            il = 0.5 / lam[i]
            d1 = (a * u1 + kz[i] * u3 + km * u4) * il
            d2 = (a * u2 + kp * u3 - kz[i] * u4) * il
            d3 = (kz[i] * u1 + km * u2 - a * u3) * il
            d4 = (kp * u1 - kz[i] * u2 - a * u4) * il
            p[i, 0] = 0.5 * u1 + d1
            p[i, 1] = 0.5 * u2 + d2
            p[i, 2] = 0.5 * u3 + d3
            p[i, 3] = 0.5 * u4 + d4
            q[i, 0] = 0.5 * u1 - d1
            q[i, 1] = 0.5 * u2 - d2
            q[i, 2] = 0.5 * u3 - d3
            q[i, 3] = 0.5 * u4 - d4
    return up, um


def weighted_inner(const double[::1] w, const double complex[:, ::1] u,
                   const double complex[:, ::1] v):
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t i
    cdef double s = 0.0
    cdef double complex zu, zv
    with nogil:
        for i in range(m):
            zu = u[i, 0]
            zv = v[i, 0]
            s += w[i] * (zu.real * zv.real + zu.imag * zv.imag)
            zu = u[i, 1]
            zv = v[i, 1]
            s += w[i] * (zu.real * zv.real + zu.imag * zv.imag)
            zu = u[i, 2]
            zv = v[i, 2]
            s += w[i] * (zu.real * zv.real + zu.imag * zv.imag)
            zu = u[i, 3]
            zv = v[i, 3]
            s += w[i] * (zu.real * zv.real + zu.imag * zv.imag)
    return s


def weighted_norm2(const double[::1] w, const double complex[:, ::1] u):
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t i
    cdef double s = 0.0
    cdef double complex z
    with nogil:
        for i in range(m):
            z = u[i, 0]
            s += w[i] * (z.real * z.real + z.imag * z.imag)
            z = u[i, 1]
            s += w[i] * (z.real * z.real + z.imag * z.imag)
            z = u[i, 2]
            s += w[i] * (z.real * z.real + z.imag * z.imag)
            z = u[i, 3]
            s += w[i] * (z.real * z.real + z.imag * z.imag)
    return s


def scale4(const double[::1] s, const double complex[:, ::1] u):
    cdef Py_ssize_t m = u.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((m, 4), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            o[i, 0] = s[i] * u[i, 0]
            o[i, 1] = s[i] * u[i, 1]
            o[i, 2] = s[i] * u[i, 2]
            o[i, 3] = s[i] * u[i, 3]
    return out


def pow_F_sum(const double[::1] kw, const double[::1] c0, const double[::1] c1,
              const double[::1] c2, double t, double p):
    cdef Py_ssize_t m = kw.shape[0]
    cdef Py_ssize_t i
    cdef double acc = 0.0
    cdef double s2
    cdef double hp = 0.5 * p
    with nogil:
        for i in range(m):
            s2 = c0[i] + 2.0 * t * c1[i] + t * t * c2[i]
            if s2 > 0.0:
                acc += kw[i] * pow(s2, hp)
    return acc / p


def pow_g_sum(const double[::1] kw, const double[::1] c0, const double[::1] c1,
              const double[::1] c2, double t, double p):
    cdef Py_ssize_t m = kw.shape[0]
    cdef Py_ssize_t i
    cdef double acc = 0.0
    cdef double s2
    cdef double he = 0.5 * (p - 2.0)
    with nogil:
        for i in range(m):
            s2 = c0[i] + 2.0 * t * c1[i] + t * t * c2[i]
            if s2 > 0.0:
                acc += kw[i] * pow(s2, he) * (c1[i] + t * c2[i])
    return acc


def pow_f_field(const double[::1] kw, const double[::1] s,
                const double complex[:, ::1] u, double p):
    cdef Py_ssize_t m = kw.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((m, 4), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t i
    cdef double w
    cdef double e = p - 2.0
    with nogil:
        for i in range(m):
            w = kw[i] * pow(s[i], e)
            o[i, 0] = w * u[i, 0]
            o[i, 1] = w * u[i, 1]
            o[i, 2] = w * u[i, 2]
            o[i, 3] = w * u[i, 3]
    return out
