# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every function here has a numpy twin with the same signature in
``_pykernels``; ``friable.kernels`` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32

DEF TIE_TOL = 1e-9
DEF GUARD = 1e-12


cdef inline void _neumaier(double* s, double* c, double x) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        c[0] += (s[0] - t) + x
    else:
        c[0] += (x - t) + s[0]
    s[0] = t


def factor_window(i64 lo, i64 hi, const i64[::1] primes):
    """Largest prime factor and radical of every n in [lo, hi), lo >= 1.

    ``primes`` must contain every prime up to isqrt(hi - 1).
    """
    cdef Py_ssize_t m = hi - lo
    cdef cnp.ndarray[i32, ndim=1] lpf_a = np.ones(m, dtype=np.int32)
    cdef cnp.ndarray[i32, ndim=1] rad_a = np.ones(m, dtype=np.int32)
    cdef cnp.ndarray[i64, ndim=1] rem_a = np.arange(lo, hi, dtype=np.int64)
    cdef i32[::1] lpf = lpf_a
    cdef i32[::1] rad = rad_a
    cdef i64[::1] rem = rem_a
    cdef Py_ssize_t j, np_ = primes.shape[0]
    cdef i64 p, n, r, start
    with nogil:
        for j in range(np_):
            p = primes[j]
            if p * p > hi - 1:
                break
            start = ((lo + p - 1) // p) * p
            n = start
            while n < hi:
                r = rem[n - lo] // p
                while r % p == 0:
                    r = r // p
                rem[n - lo] = r
                lpf[n - lo] = <i32>p
                rad[n - lo] = rad[n - lo] * <i32>p
                n += p
        for j in range(m):
            r = rem[j]
            if r > 1:
                lpf[j] = <i32>r
                rad[j] = rad[j] * <i32>r
    return lpf_a, rad_a


def psi_window(i64 lo, i64 hi, const i64[::1] primes):
    """psi(n) = prod_{p | n} (p + 1) for n in [lo, hi), as float64."""
    cdef Py_ssize_t m = hi - lo
    cdef cnp.ndarray[double, ndim=1] psi_a = np.ones(m, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=1] rem_a = np.arange(lo, hi, dtype=np.int64)
    cdef double[::1] psi = psi_a
    cdef i64[::1] rem = rem_a
    with nogil:
        _psi_fill(lo, hi, primes, psi, rem)
    return psi_a


cdef void _psi_fill(i64 lo, i64 hi, const i64[::1] primes, double[::1] psi,
                    i64[::1] rem) noexcept nogil:
    cdef Py_ssize_t j, m = hi - lo, np_ = primes.shape[0]
    cdef i64 p, n, r
    for j in range(np_):
        p = primes[j]
        if p * p > hi - 1:
            break
        n = ((lo + p - 1) // p) * p
        while n < hi:
            r = rem[n - lo] // p
            while r % p == 0:
                r = r // p
            rem[n - lo] = r
            psi[n - lo] *= <double>(p + 1)
            n += p
    for j in range(m):
        if rem[j] > 1:
            psi[j] *= <double>(rem[j] + 1)


def psi_window_sums(i64 lo, i64 hi, const i64[::1] primes, i64 block=1 << 16):
    """(sum 1/psi(n), sum 1/(n psi(n))) over n in [lo, hi), compensated."""
    cdef cnp.ndarray[double, ndim=1] psi_a = np.empty(block, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=1] rem_a = np.empty(block, dtype=np.int64)
    cdef double[::1] psi = psi_a
    cdef i64[::1] rem = rem_a
    cdef double s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0
    cdef i64 a, b, j
    with nogil:
        a = lo
        while a < hi:
            b = a + block
            if b > hi:
                b = hi
            for j in range(b - a):
                psi[j] = 1.0
                rem[j] = a + j
            _psi_fill(a, b, primes, psi[:b - a], rem[:b - a])
            for j in range(b - a):
                _neumaier(&s1, &c1, 1.0 / psi[j])
                _neumaier(&s2, &c2, 1.0 / (psi[j] * <double>(a + j)))
            a = b
    return s1 + c1, s2 + c2


def count_le(const i32[::1] values, i64 bound):
    """Number of entries of ``values`` that are <= bound."""
    cdef Py_ssize_t i
    cdef i64 total = 0
    with nogil:
        for i in range(values.shape[0]):
            if values[i] <= bound:
                total += 1
    return total


cdef inline bint _pow_le(i64 base, int e, i64 n) noexcept nogil:
    cdef i64 acc = 1
    cdef int i
    for i in range(e):
        acc *= base
        if acc > n:
            return False
    return True


def count_root_le(const i32[::1] values, i64 first_n, double u):
    """Count i with values[i] <= n**(1/u), n = first_n + i; n = 1 always counts.

    Integer u in [1, 64] is decided exactly near ties; otherwise the comparison
    u*log(v) <= log(n) carries a relative inclusion guard of 1e-12 on v.
    """
    cdef Py_ssize_t i, m = values.shape[0]
    cdef i64 n, total = 0
    cdef double a, b, slack
    cdef int ui = <int>u
    cdef bint exact = (u == <double>ui) and 1 <= ui <= 64
    if u <= 0.0:
        return m
    with nogil:
        for i in range(m):
            n = first_n + i
            if n == 1:
                total += 1
                continue
            a = u * log(<double>values[i])
            b = log(<double>n)
            if exact:
                slack = TIE_TOL * (1.0 + b)
                if a < b - slack:
                    total += 1
                elif a <= b + slack:
                    if _pow_le(values[i], ui, n):
                        total += 1
            elif a <= b + u * GUARD:
                total += 1
    return total


def count_kernel_threshold(const i32[::1] rad, i64 first_n, double theta, double alpha):
    """Count i with rad[i] <= n**theta * (log n)**alpha, n = first_n + i; n = 1 always counts."""
    cdef Py_ssize_t i, m = rad.shape[0]
    cdef i64 n, total = 0
    cdef double b, ln
    with nogil:
        for i in range(m):
            n = first_n + i
            if n == 1:
                total += 1
                continue
            ln = log(<double>n)
            b = theta * ln + alpha * log(ln)
            if log(<double>rad[i]) <= b + GUARD:
                total += 1
    return total


def dickman_sum(const i32[::1] lpf, i64 first_n, double log_numer=-1.0):
    """sum over n >= 2 of L / log lpf[i], n = first_n + i, L = log n or log_numer if >= 0."""
    cdef Py_ssize_t i, m = lpf.shape[0]
    cdef i64 n
    cdef double s = 0.0, c = 0.0, num
    with nogil:
        for i in range(m):
            n = first_n + i
            if n < 2:
                continue
            num = log(<double>n) if log_numer < 0.0 else log_numer
            _neumaier(&s, &c, num / log(<double>lpf[i]))
    return s + c
