"""Pure numpy fallback for the compiled kernels in ``_ckernels.pyx``.

Loops over ``q`` and vectorizes over ``a``.  Exact paths use int64 arrays
when the caller's magnitude bound allows it and Python integers otherwise.
"""

import math

import numpy as np

from .curves import FAMILIES, _NumpyLib

RAW, REDUCED, TILDE = 0, 1, 2
_BY_CODE = {fam.code: fam for fam in FAMILIES.values()}
_INT64_SAFE = 2**62


def _f(code, params, sign, x):
    fam = _BY_CODE[code]
    return sign * fam.evaluate(tuple(params), x, _NumpyLib, 0)


def _a_range(q, lo_n, lo_d, hi_n, hi_d):
    return -((-q * lo_n) // lo_d), (q * hi_n) // hi_d


def count_float(code, params, sign, lo_n, lo_d, hi_n, hi_d, q_lo, q_hi, mode, delta, Q):
    count = ties = 0
    params = np.asarray(params, dtype=float)
    for q in range(q_lo, q_hi + 1):
        a0, a1 = _a_range(q, lo_n, lo_d, hi_n, hi_d)
        if a1 < a0:
            continue
        a = np.arange(a0, a1 + 1, dtype=np.int64)
        v = sign * (q * _f(code, params, 1, a / q))
        b = np.floor(v + 0.5)
        dist = np.abs(v - b)
        thr = delta if mode != TILDE else delta * q / Q
        ties += int(np.count_nonzero(np.abs(dist - thr) < 1e-12 * max(q, 1)))
        hit = dist < thr
        if mode == RAW:
            count += int(np.count_nonzero(hit))
        else:
            g = np.gcd(np.gcd(a[hit], q), b[hit].astype(np.int64))
            count += int(np.count_nonzero(g == 1))
    return count, ties


def _numerators(coeffs, a, q, big):
    """n = sum_i c_i a^i q^(d-i) as int64 array or Python-int object array."""
    deg = len(coeffs) - 1
    if big:
        a = a.astype(object)
        q = int(q)
        acc = np.full(a.shape, int(coeffs[deg]), dtype=object)
    else:
        acc = np.full(a.shape, int(coeffs[deg]), dtype=np.int64)
    qp = 1
    for i in range(deg - 1, -1, -1):
        qp = qp * q
        acc = acc * a + int(coeffs[i]) * qp
    return acc


def _needs_big(coeffs, L, lo_n, lo_d, hi_n, hi_d, Q, extra=1):
    deg = len(coeffs) - 1
    A = Q * max(abs(lo_n) // lo_d + 1, abs(hi_n) // hi_d + 1)
    bound = sum(abs(int(c)) * A**i * Q ** (deg - i) for i, c in enumerate(coeffs))
    M = abs(L) * Q ** (deg - 1)
    return (2 * bound + 2 * M) * extra >= _INT64_SAFE


def count_exact(coeffs, L, lo_n, lo_d, hi_n, hi_d, q_lo, q_hi, mode, p, r, Q):
    deg = len(coeffs) - 1
    big = _needs_big(coeffs, L, lo_n, lo_d, hi_n, hi_d, Q)
    count = 0
    for q in range(q_lo, q_hi + 1):
        a0, a1 = _a_range(q, lo_n, lo_d, hi_n, hi_d)
        if a1 < a0:
            continue
        a = np.arange(a0, a1 + 1, dtype=np.int64)
        n = _numerators(coeffs, a, q, big)
        M = int(L) * int(q) ** (deg - 1)
        b = (2 * n + M) // (2 * M)
        dist = np.abs(n - b * M)
        # r*dist < p*M  <=>  dist <= ceil(p*M/r) - 1, evaluated as a scalar bound
        if mode == TILDE:
            limit = -((-p * q * M) // (r * Q)) - 1
        else:
            limit = -((-p * M) // r) - 1
        hit = np.asarray(dist <= limit, dtype=bool)
        if mode == RAW:
            count += int(np.count_nonzero(hit))
            continue
        g = np.gcd(a[hit], q)
        bh = b[hit]
        if big:
            ok = [math.gcd(int(gi), int(bi)) == 1 for gi, bi in zip(g, bh)]
            count += sum(ok)
        else:
            count += int(np.count_nonzero(np.gcd(g, bh.astype(np.int64)) == 1))
    return count


def sequence_float(code, params, sign, lo_n, lo_d, hi_n, hi_d, Q, n_total):
    params = np.asarray(params, dtype=float)
    out = np.empty(n_total, dtype=np.float64)
    i = 0
    for q in range(1, Q + 1):
        a0, a1 = _a_range(q, lo_n, lo_d, hi_n, hi_d)
        if a1 < a0:
            continue
        a = np.arange(a0, a1 + 1)
        v = sign * (q * _f(code, params, 1, a / q))
        v = v - np.floor(v)
        v[v >= 1.0] = 0.0
        out[i:i + v.size] = v
        i += v.size
    return out


def sequence_exact(coeffs, L, lo_n, lo_d, hi_n, hi_d, Q, n_total):
    deg = len(coeffs) - 1
    big = _needs_big(coeffs, L, lo_n, lo_d, hi_n, hi_d, Q)
    out = np.empty(n_total, dtype=np.float64)
    i = 0
    for q in range(1, Q + 1):
        a0, a1 = _a_range(q, lo_n, lo_d, hi_n, hi_d)
        if a1 < a0:
            continue
        a = np.arange(a0, a1 + 1, dtype=np.int64)
        n = _numerators(coeffs, a, q, big)
        M = int(L) * q ** (deg - 1)
        rem = n % M
        out[i:i + a.size] = np.asarray(rem, dtype=float) / M
        i += a.size
    return out


def _phase_sum(frac):
    ang = 2 * np.pi * frac
    return complex(math.fsum(np.cos(ang).tolist()), math.fsum(np.sin(ang).tolist()))


def exp_sum_float(code, params, sign, lo_n, lo_d, hi_n, hi_d, k, q):
    a0, a1 = _a_range(q, lo_n, lo_d, hi_n, hi_d)
    a = np.arange(a0, a1 + 1)
    v = sign * (float(k) * q * _f(code, np.asarray(params, dtype=float), 1, a / q))
    return _phase_sum(v - np.floor(v))


def exp_sum_exact(coeffs, L, lo_n, lo_d, hi_n, hi_d, k, q):
    deg = len(coeffs) - 1
    a0, a1 = _a_range(q, lo_n, lo_d, hi_n, hi_d)
    a = np.arange(a0, a1 + 1, dtype=np.int64)
    big = _needs_big(coeffs, L, lo_n, lo_d, hi_n, hi_d, q, extra=k)
    n = k * _numerators(coeffs, a, q, big)
    M = int(L) * q ** (deg - 1)
    return _phase_sum(np.asarray(n % M, dtype=float) / M)


def gl_integrate(code, params, sign, lo, hi, k, j, q, n_panels, nodes, weights):
    params = np.asarray(params, dtype=float)
    h = (hi - lo) / n_panels
    re = []
    im = []
    # chunk panels to bound memory
    step = max(1, 200_000 // len(nodes))
    for t0 in range(0, n_panels, step):
        t = np.arange(t0, min(n_panels, t0 + step))
        mid = lo + (t + 0.5) * h
        x = mid[:, None] + 0.5 * h * nodes[None, :]
        v = q * (k * _f(code, params, sign, x) - j * x)
        v = v - np.floor(v)
        ang = 2 * np.pi * v
        re.extend((0.5 * h * (np.cos(ang) @ weights)).tolist())
        im.extend((0.5 * h * (np.sin(ang) @ weights)).tolist())
    return complex(math.fsum(re), math.fsum(im))


def weyl_sums(values, K):
    values = np.asarray(values, dtype=float)
    out = np.empty(K, dtype=np.complex128)
    for k in range(1, K + 1):
        v = k * values
        out[k - 1] = _phase_sum(v - np.floor(v))
    return out
