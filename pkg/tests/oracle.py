"""Slow independent oracles: rational or 40-digit arithmetic, no kernels."""

import math
from fractions import Fraction

import mpmath


def _values(fn, q, lo, hi):
    for a in range(math.ceil(q * lo), math.floor(q * hi) + 1):
        yield a, fn(a, q)


def poly_fn(coeffs):
    """``(a, q) -> q * f(a/q)`` exactly, ascending rational coefficients."""
    cs = [Fraction(c) for c in coeffs]

    def fn(a, q):
        x = Fraction(a, q)
        return q * sum(c * x**i for i, c in enumerate(cs))

    return fn


def mp_fn(f):
    """``(a, q) -> q * f(a/q)`` in 40-digit arithmetic for an mpmath-callable ``f``."""

    def fn(a, q):
        with mpmath.workdps(40):
            return q * f(mpmath.mpf(a) / q)

    return fn


def _nearest(v):
    b = math.floor(v + Fraction(1, 2)) if isinstance(v, Fraction) else int(mpmath.nint(v))
    return b, abs(v - b)


def brute_counts(fn, Q, delta, lo, hi):
    """``(raw, reduced, tilde)`` by enumerating every ``a/q`` in ``[lo, hi]``."""
    lo, hi, delta = Fraction(lo), Fraction(hi), Fraction(delta)
    raw = red = til = 0
    for q in range(1, Q + 1):
        for a, v in _values(fn, q, lo, hi):
            b, d = _nearest(v)
            if not isinstance(d, Fraction):
                with mpmath.workdps(40):
                    d = Fraction(mpmath.nstr(d, 35, strip_zeros=False)) if d else Fraction(0)
            if d < delta:
                raw += 1
                if math.gcd(math.gcd(a, b), q) == 1:
                    red += 1
                    if d * Q < delta * q:
                        til += 1
    return raw, red, til
