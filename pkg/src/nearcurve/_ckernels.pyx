# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Same call signatures as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil, fabs, sqrt, exp, log, pow, cos, sin, M_PI

cdef extern from *:
    ctypedef long long int128 "__int128"

ctypedef long long i64

cdef enum:
    RAW = 0
    REDUCED = 1
    TILDE = 2


cdef inline double feval(int code, const double* p, double x) noexcept nogil:
    cdef double s, g
    if code == 0:
        return (p[0] * x + p[1]) * x + p[2]
    elif code == 1:
        return pow(x, p[0])
    elif code == 2:
        return sqrt(p[0] * p[0] - x * x)
    elif code == 3:
        return exp(x)
    elif code == 4:
        return log(x)
    elif code == 5:
        return ((p[0] * x + p[1]) * x + p[2]) * x + p[3]
    else:
        g = 1.0 - pow(x, p[0])
        return pow(g, 1.0 / p[0])


cdef inline i64 floordiv(i64 a, i64 b) noexcept nogil:
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline i64 ceildiv(i64 a, i64 b) noexcept nogil:
    return -floordiv(-a, b)


cdef inline int128 floordiv128(int128 a, int128 b) noexcept nogil:
    cdef int128 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline i64 gcd64(i64 a, i64 b) noexcept nogil:
    cdef i64 t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline int128 abs128(int128 a) noexcept nogil:
    return -a if a < 0 else a


def count_float(int code, double[::1] params, int sign,
                i64 lo_n, i64 lo_d, i64 hi_n, i64 hi_d,
                i64 q_lo, i64 q_hi, int mode, double delta, i64 Q):
    """Float enumeration with guard band; returns (count, ties)."""
    cdef i64 q, a, a0, a1, b, count = 0, ties = 0
    cdef double v, dist, thr, guard, x
    cdef const double* p = &params[0] if params.shape[0] > 0 else NULL
    cdef double sg = sign
    with nogil:
        for q in range(q_lo, q_hi + 1):
            a0 = ceildiv(q * lo_n, lo_d)
            a1 = floordiv(q * hi_n, hi_d)
            guard = 1e-12 * (q if q > 1 else 1)
            thr = delta if mode != TILDE else delta * q / Q
            for a in range(a0, a1 + 1):
                x = <double> a / <double> q
                v = sg * q * feval(code, p, x)
                b = <i64> floor(v + 0.5)
                dist = fabs(v - <double> b)
                if fabs(dist - thr) < guard:
                    ties += 1
                if dist < thr:
                    if mode == RAW or gcd64(gcd64(a, q), b) == 1:
                        count += 1
    return count, ties


cdef inline int128 ipow(i64 b, int e) noexcept nogil:
    cdef int128 r = 1
    cdef int i
    for i in range(e):
        r *= b
    return r


cdef inline int128 poly_num(const i64* c, int deg, i64 a, i64 q) noexcept nogil:
    # homogeneous Horner: sum_i c_i a^i q^(deg-i)
    cdef int128 acc = c[deg]
    cdef int128 qp = 1
    cdef int i
    for i in range(deg - 1, -1, -1):
        qp = qp * q
        acc = acc * a + (<int128> c[i]) * qp
    return acc


def count_exact(i64[::1] coeffs, i64 L, i64 lo_n, i64 lo_d, i64 hi_n, i64 hi_d,
                i64 q_lo, i64 q_hi, int mode, i64 p, i64 r, i64 Q):
    """Exact rational enumeration; ``coeffs`` are ascending numerators over ``L``.

    q f(a/q) = n / M with n = sum c_i a^i q^(d-i), M = L q^(d-1).
    """
    cdef int deg = coeffs.shape[0] - 1
    cdef const i64* c = &coeffs[0]
    cdef i64 q, a, a0, a1, g, count = 0
    cdef int128 n, M, b, dist, lhs, rhs
    with nogil:
        for q in range(q_lo, q_hi + 1):
            a0 = ceildiv(q * lo_n, lo_d)
            a1 = floordiv(q * hi_n, hi_d)
            M = (<int128> L) * ipow(q, deg - 1)
            for a in range(a0, a1 + 1):
                n = poly_num(c, deg, a, q)
                b = floordiv128(2 * n + M, 2 * M)
                dist = abs128(n - b * M)
                if mode == TILDE:
                    lhs = (<int128> r) * Q * dist
                    rhs = (<int128> p) * q * M
                else:
                    lhs = (<int128> r) * dist
                    rhs = (<int128> p) * M
                if lhs < rhs:
                    if mode == RAW:
                        count += 1
                    else:
                        g = gcd64(a, q)
                        if g == 1 or gcd64(g, <i64> (abs128(b) % g)) == 1:
                            count += 1
    return count


def sequence_float(int code, double[::1] params, int sign,
                   i64 lo_n, i64 lo_d, i64 hi_n, i64 hi_d, i64 Q, i64 n_total):
    """Fractional parts of q f(a/q) in (q, a) order."""
    out = np.empty(n_total, dtype=np.float64)
    cdef double[::1] o = out
    cdef const double* p = &params[0] if params.shape[0] > 0 else NULL
    cdef i64 q, a, a0, a1, i = 0
    cdef double v, sg = sign
    with nogil:
        for q in range(1, Q + 1):
            a0 = ceildiv(q * lo_n, lo_d)
            a1 = floordiv(q * hi_n, hi_d)
            for a in range(a0, a1 + 1):
                v = sg * q * feval(code, p, <double> a / <double> q)
                v = v - floor(v)
                o[i] = v if v < 1.0 else 0.0
                i += 1
    return out


def sequence_exact(i64[::1] coeffs, i64 L, i64 lo_n, i64 lo_d, i64 hi_n, i64 hi_d,
                   i64 Q, i64 n_total):
    out = np.empty(n_total, dtype=np.float64)
    cdef double[::1] o = out
    cdef int deg = coeffs.shape[0] - 1
    cdef const i64* c = &coeffs[0]
    cdef i64 q, a, a0, a1, i = 0
    cdef int128 n, M, rem
    with nogil:
        for q in range(1, Q + 1):
            a0 = ceildiv(q * lo_n, lo_d)
            a1 = floordiv(q * hi_n, hi_d)
            M = (<int128> L) * ipow(q, deg - 1)
            for a in range(a0, a1 + 1):
                n = poly_num(c, deg, a, q)
                rem = n - floordiv128(n, M) * M
                o[i] = (<double> rem) / (<double> M)
                i += 1
    return out


cdef inline void neumaier(double* s, double* comp, double x) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        comp[0] += (s[0] - t) + x
    else:
        comp[0] += (x - t) + s[0]
    s[0] = t


def exp_sum_float(int code, double[::1] params, int sign,
                  i64 lo_n, i64 lo_d, i64 hi_n, i64 hi_d, i64 k, i64 q):
    cdef const double* p = &params[0] if params.shape[0] > 0 else NULL
    cdef i64 a, a0, a1
    cdef double v, sr = 0, cr = 0, si = 0, ci = 0, sg = sign
    a0 = ceildiv(q * lo_n, lo_d)
    a1 = floordiv(q * hi_n, hi_d)
    with nogil:
        for a in range(a0, a1 + 1):
            v = sg * (<double> k) * q * feval(code, p, <double> a / <double> q)
            v = v - floor(v)
            neumaier(&sr, &cr, cos(2 * M_PI * v))
            neumaier(&si, &ci, sin(2 * M_PI * v))
    return complex(sr + cr, si + ci)


def exp_sum_exact(i64[::1] coeffs, i64 L, i64 lo_n, i64 lo_d, i64 hi_n, i64 hi_d,
                  i64 k, i64 q):
    cdef int deg = coeffs.shape[0] - 1
    cdef const i64* c = &coeffs[0]
    cdef i64 a, a0, a1
    cdef int128 n, M, rem
    cdef double v, sr = 0, cr = 0, si = 0, ci = 0
    a0 = ceildiv(q * lo_n, lo_d)
    a1 = floordiv(q * hi_n, hi_d)
    M = (<int128> L) * ipow(q, deg - 1)
    with nogil:
        for a in range(a0, a1 + 1):
            n = k * poly_num(c, deg, a, q)
            rem = n - floordiv128(n, M) * M
            v = (<double> rem) / (<double> M)
            neumaier(&sr, &cr, cos(2 * M_PI * v))
            neumaier(&si, &ci, sin(2 * M_PI * v))
    return complex(sr + cr, si + ci)


def gl_integrate(int code, double[::1] params, int sign, double lo, double hi,
                 double k, double j, double q, i64 n_panels,
                 double[::1] nodes, double[::1] weights):
    """Panel Gauss-Legendre for the integral of e(q (k f(x) - j x)) over [lo, hi]."""
    cdef const double* p = &params[0] if params.shape[0] > 0 else NULL
    cdef int m = nodes.shape[0], i
    cdef i64 t
    cdef double h = (hi - lo) / n_panels, half = 0.5 * h, mid, x, v, w
    cdef double sr = 0, cr = 0, si = 0, ci = 0, pr, pi_, sg = sign
    with nogil:
        for t in range(n_panels):
            mid = lo + (t + 0.5) * h
            pr = 0
            pi_ = 0
            for i in range(m):
                x = mid + half * nodes[i]
                v = q * (k * sg * feval(code, p, x) - j * x)
                v = v - floor(v)
                w = weights[i]
                pr += w * cos(2 * M_PI * v)
                pi_ += w * sin(2 * M_PI * v)
            neumaier(&sr, &cr, half * pr)
            neumaier(&si, &ci, half * pi_)
    return complex(sr + cr, si + ci)


def weyl_sums(double[::1] values, i64 K):
    """S_k = sum_n e(k u_n) for k = 1..K (index 0 holds k = 1)."""
    out = np.empty(K, dtype=np.complex128)
    cdef i64 N = values.shape[0], n, kk
    cdef double v, sr, si, cr, ci
    cdef double[::1] re = np.empty(K), im = np.empty(K)
    with nogil:
        for kk in range(1, K + 1):
            sr = 0
            si = 0
            cr = 0
            ci = 0
            for n in range(N):
                v = kk * values[n]
                v = v - floor(v)
                neumaier(&sr, &cr, cos(2 * M_PI * v))
                neumaier(&si, &ci, sin(2 * M_PI * v))
            re[kk - 1] = sr + cr
            im[kk - 1] = si + ci
    out.real = np.asarray(re)
    out.imag = np.asarray(im)
    return out
