"""Exact enumeration of the three counting functions.

``count_raw``      pairs (a, q) with ``||q f(a/q)|| < delta``
``count_reduced``  triples with gcd(a, b, q) = 1 and ``|f(a/q) - b/q| < delta/q``
``count_tilde``    as reduced, threshold ``delta/Q``

``a/q`` ranges over the closed interval.  Work is split over disjoint
``q`` ranges; subtotals are integers so any worker count gives the same
result.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from . import _backend
from .constants import ZETA3
from .curves import Interval, PlanarCurve, to_fraction

__all__ = [
    "CountingError",
    "TieError",
    "RationalPoint",
    "CountReport",
    "count",
    "count_raw",
    "count_reduced",
    "count_tilde",
    "mobius_residual",
    "on_curve_count_parabola",
    "near_points_list",
]

MODES = {"raw": 0, "reduced": 1, "tilde": 2}
Q_SQUARED_LIMIT = 2**62
INT128_LIMIT = 2**126
INT64_LIMIT = 2**63
GUARD = 1e-12
ENDPOINT_CONVENTION = "closed"

Delta = Union[float, Fraction, int, str]


class CountingError(ValueError):
    """Invalid counting input (delta range, Q overflow, magnitude)."""


class TieError(ArithmeticError):
    """A float decision fell inside the guard band where exactness is required."""


@dataclass(frozen=True)
class RationalPoint:
    a: int
    b: int
    q: int
    reduced: bool
    distance: float


@dataclass(frozen=True)
class CountReport:
    count: int
    Q: int
    delta: Delta
    main_term: float
    ratio: float
    ties: int
    mode: str
    exact: bool = False
    endpoints: str = ENDPOINT_CONVENTION
    wall_ms: float = field(default=0.0, compare=False)

    def record(self, timing: bool = True) -> dict:
        rec = {
            "mode": self.mode,
            "Q": self.Q,
            "delta": str(self.delta),
            "count": self.count,
            "main_term": self.main_term,
            "ratio": self.ratio,
            "ties": self.ties,
            "exact": self.exact,
            "endpoints": self.endpoints,
        }
        rec["wall_ms"] = round(self.wall_ms, 3) if timing else 0.0
        return rec


def _check_delta(delta) -> None:
    if not (0 < delta <= Fraction(1, 2)):
        raise CountingError("delta must lie in (0, 1/2]")


def _check_Q(Q: int) -> None:
    if int(Q) != Q or Q < 1:
        raise CountingError("Q must be a positive integer")
    if Q * Q >= Q_SQUARED_LIMIT:
        raise CountingError("Q^2 >= 2^62 rejected (overflow guard)")


def _rational_interval(interval: Interval) -> tuple[int, int, int, int]:
    lo, hi = interval.frac_lo, interval.frac_hi
    for v in (lo.numerator, lo.denominator, hi.numerator, hi.denominator):
        if abs(v) >= 2**31:
            raise CountingError("interval endpoints need numerators/denominators below 2^31")
    return lo.numerator, lo.denominator, hi.numerator, hi.denominator


def _exact_data(curve: PlanarCurve) -> tuple[np.ndarray, int]:
    coeffs = curve.exact_coeffs
    L = 1
    for c in coeffs:
        L = L * c.denominator // math.gcd(L, c.denominator)
    nums = [int(c * L) for c in coeffs]
    if any(abs(n) >= INT64_LIMIT for n in nums + [L]):
        raise CountingError("polynomial coefficients exceed the 64-bit range")
    return np.array(nums, dtype=np.int64), L


def _exact_magnitude_ok(nums, L, interval: Interval, Q: int, p: int, r: int) -> bool:
    deg = len(nums) - 1
    lo, hi = interval.frac_lo, interval.frac_hi
    A = Q * (max(abs(lo), abs(hi)) + 1)
    bound = sum(abs(int(c)) * A**i * Q ** (deg - i) for i, c in enumerate(nums))
    M = L * Q ** (deg - 1)
    worst = max(2 * bound + 2 * M, (r * Q + 1) * (bound + M), p * Q * M)
    return worst < INT128_LIMIT and p < INT64_LIMIT and r < INT64_LIMIT


def _resolve_workers(workers: int) -> int:
    if workers == 0:
        return os.cpu_count() or 1
    return max(1, int(workers))


def _q_chunks(Q: int, workers: int) -> list[tuple[int, int]]:
    # balance by work ~ q: split [1, Q] at sqrt-spaced cut points
    n = max(1, min(Q, 4 * workers))
    cuts = [0] + [int(round(Q * math.sqrt(i / n))) for i in range(1, n)] + [Q]
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi > lo:
            out.append((lo + 1, hi))
    return out


def _run_chunks(fn, Q: int, workers: int) -> list:
    chunks = _q_chunks(Q, workers)
    if workers <= 1 or len(chunks) == 1:
        return [fn(lo, hi) for lo, hi in chunks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        # map preserves chunk order, so the reduction order is fixed
        return list(ex.map(lambda c: fn(*c), chunks))


def _main_term(curve: PlanarCurve, Q: int, delta, mode: str) -> float:
    base = curve.interval.length() * float(delta) * Q * Q
    return base / ZETA3 if mode == "reduced" else base


def _use_exact(curve: PlanarCurve, delta, exact: bool | None) -> bool:
    if exact is None:
        return curve.exact_capable and isinstance(delta, (Fraction, int, str))
    if exact and not curve.exact_capable:
        raise CountingError(f"curve {curve.family_id} has no exact integer path")
    return bool(exact)


def count(curve: PlanarCurve, Q: int, delta: Delta, mode: str = "raw", *,
          exact: bool | None = None, workers: int = 1, backend: str | None = None) -> CountReport:
    """Count in the given ``mode`` (``raw``, ``reduced`` or ``tilde``).

    ``exact=None`` selects the integer path when the curve is a rational
    polynomial and ``delta`` is given as a rational (``Fraction``, int or
    ``"p/q"`` string).  Float decisions within ``1e-12 * max(1, q)`` of the
    threshold are counted by sign and reported in ``ties``.
    """
    if mode not in MODES:
        raise CountingError(f"mode must be one of {sorted(MODES)}")
    if isinstance(delta, str):
        delta = to_fraction(delta)
    _check_delta(delta)
    _check_Q(Q)
    Q = int(Q)
    kern = _backend.get(backend)
    workers = _resolve_workers(workers)
    lo_n, lo_d, hi_n, hi_d = _rational_interval(curve.interval)
    use_exact = _use_exact(curve, delta, exact)
    t0 = time.perf_counter()
    if use_exact:
        frac = to_fraction(delta)
        nums, L = _exact_data(curve)
        if not _exact_magnitude_ok(nums, L, curve.interval, Q, frac.numerator, frac.denominator):
            raise CountingError("exact path would exceed 128-bit integer range")
        p, r = frac.numerator, frac.denominator

        def work(q_lo, q_hi):
            return kern.count_exact(nums, L, lo_n, lo_d, hi_n, hi_d, q_lo, q_hi,
                                    MODES[mode], p, r, Q), 0
    else:
        params = np.asarray(curve.params, dtype=float)
        fmax = float(np.max(np.abs(curve.f(np.linspace(float(curve.interval.lo),
                                                       float(curve.interval.hi), 257)))))
        if fmax * Q * 2 >= 2**52:
            raise CountingError("q f(a/q) exceeds the exactly representable float range")
        d = float(delta)

        def work(q_lo, q_hi):
            return kern.count_float(curve.code, params, curve.sign, lo_n, lo_d, hi_n, hi_d,
                                    q_lo, q_hi, MODES[mode], d, Q)

    parts = _run_chunks(work, Q, workers)
    total = sum(c for c, _ in parts)
    ties = sum(t for _, t in parts)
    wall = (time.perf_counter() - t0) * 1e3
    main = _main_term(curve, Q, delta, mode)
    ratio = total / main if main > 0 else float("nan")
    return CountReport(count=int(total), Q=Q, delta=delta, main_term=main, ratio=ratio,
                       ties=int(ties), mode=mode, exact=use_exact, wall_ms=wall)


def count_raw(curve: PlanarCurve, Q: int, delta: Delta, **kw) -> CountReport:
    return count(curve, Q, delta, "raw", **kw)


def count_reduced(curve: PlanarCurve, Q: int, delta: Delta, **kw) -> CountReport:
    return count(curve, Q, delta, "reduced", **kw)


def count_tilde(curve: PlanarCurve, Q: int, delta: Delta, **kw) -> CountReport:
    return count(curve, Q, delta, "tilde", **kw)


def mobius_residual(curve: PlanarCurve, Q: int, delta: Delta, **kw) -> int:
    """``count_raw(Q, delta) - sum_d count_reduced(Q // d, delta / d)``.

    The divisor sum runs over ``d = 1..Q``; rational ``delta`` is divided
    exactly.  Any subcount with ties raises :class:`TieError`.
    """
    if isinstance(delta, str):
        delta = to_fraction(delta)
    raw = count_raw(curve, Q, delta, **kw)
    if raw.ties:
        raise TieError(f"ambiguous decision in raw count at Q={Q}, delta={delta}")
    total = 0
    for d in range(1, Q + 1):
        sub_delta = delta / d if isinstance(delta, (Fraction, int)) else float(delta) / d
        if isinstance(sub_delta, int):
            sub_delta = Fraction(sub_delta)
        rep = count_reduced(curve, Q // d, sub_delta, **kw)
        if rep.ties:
            raise TieError(f"ambiguous decision in reduced count at d={d}, Q={Q // d}")
        total += rep.count
    return raw.count - total


def on_curve_count_parabola(Q: int, interval: Interval = Interval(1, 2)) -> int:
    """Reduced rational points on ``y = x^2`` with common denominator <= Q.

    Such a point is ``(a/s, a^2/s^2)`` with gcd(a, s) = 1 and denominator
    ``s^2``, so the count is ``sum_{s <= isqrt(Q)} #{a : a/s in I, gcd(a, s) = 1}``.
    """
    lo, hi = interval.frac_lo, interval.frac_hi
    total = 0
    for s in range(1, math.isqrt(Q) + 1):
        a0 = math.ceil(s * lo)
        a1 = math.floor(s * hi)
        total += sum(1 for a in range(a0, a1 + 1) if math.gcd(a, s) == 1)
    return total


def near_points_list(curve: PlanarCurve, Q: int, delta: Delta, limit: int) -> list[RationalPoint]:
    """First ``limit`` reduced points with ``|f(a/q) - b/q| < delta/q``, in (q, a) order."""
    if isinstance(delta, str):
        delta = to_fraction(delta)
    _check_delta(delta)
    _check_Q(Q)
    out: list[RationalPoint] = []
    if limit <= 0:
        return out
    use_exact = _use_exact(curve, delta, None)
    lo, hi = curve.interval.frac_lo, curve.interval.frac_hi
    coeffs = curve.exact_coeffs
    for q in range(1, Q + 1):
        a = np.arange(math.ceil(q * lo), math.floor(q * hi) + 1)
        if a.size == 0:
            continue
        if use_exact:
            vals = [sum(c * Fraction(int(ai), q) ** i for i, c in enumerate(coeffs)) * q for ai in a]
            bs = [math.floor(v + Fraction(1, 2)) for v in vals]
            dists = [abs(v - b) for v, b in zip(vals, bs)]
            hits = [i for i, dd in enumerate(dists) if dd < delta]
            dist_f = [float(dd) / q for dd in dists]
        else:
            v = q * curve.f(a / q)
            bs = np.floor(v + 0.5).astype(np.int64).tolist()
            dd = np.abs(v - np.floor(v + 0.5))
            hits = np.nonzero(dd < float(delta))[0].tolist()
            dist_f = (dd / q).tolist()
        for i in hits:
            ai, b = int(a[i]), int(bs[i])
            if math.gcd(math.gcd(ai, q), b) != 1:
                continue
            out.append(RationalPoint(a=ai, b=b, q=q, reduced=True, distance=dist_f[i]))
            if len(out) >= limit:
                return out
    return out
