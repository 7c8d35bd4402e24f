"""Exponential sums, oscillatory integrals and discrepancy.

Conventions: ``e(x) = exp(2 pi i x)``.  Complex values are Python
``complex``.  Phases are reduced mod 1 before the exponential is taken.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _backend
from .counting import _exact_data, _rational_interval
from .curves import DualCurve, PlanarCurve, dprime_inverse, dual_eval

__all__ = [
    "ResourceError",
    "StationaryPointError",
    "SequenceSample",
    "StationaryPhaseResult",
    "e",
    "exp_sum",
    "integrate_phase",
    "oscillatory_integral",
    "stationary_phase",
    "poisson_expansion",
    "weyl_sums",
    "erdos_turan_bound",
    "discrepancy",
    "star_discrepancy",
    "curve_sequence",
    "dual_fraction_sum",
    "fresnel_truncation",
    "fresnel_average",
]

NODE_CAP = 20_000_000
GL_NODES = 20
SEQUENCE_CAP = 100_000_000

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_NODES)


class ResourceError(RuntimeError):
    """A configured resource cap (quadrature nodes, sequence length) was exceeded."""


class StationaryPointError(ValueError):
    """No interior stationary point for the requested phase."""


def e(x) -> complex:
    """``exp(2 pi i x)`` with ``x`` reduced mod 1 first; accepts ``Fraction``."""
    x = x - math.floor(x)
    return cmath.exp(2j * math.pi * float(x))


@dataclass(frozen=True)
class SequenceSample:
    values: np.ndarray
    N: int
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.N:
            raise ValueError("N must equal the number of values")
        if v.size and (v.min() < 0 or v.max() >= 1):
            raise ValueError("sample values must lie in [0, 1)")

    @classmethod
    def from_values(cls, values, **source) -> "SequenceSample":
        v = np.asarray(values, dtype=float)
        v = v - np.floor(v)
        v[v >= 1.0] = 0.0
        return cls(values=v, N=int(v.size), source=dict(source))


@dataclass(frozen=True)
class StationaryPhaseResult:
    value: complex
    x0: float
    kappa: float
    error_budget: float
    phase: float = 0.0


# ---------------------------------------------------------------------------
# exponential sums and integrals
# ---------------------------------------------------------------------------


def exp_sum(curve: PlanarCurve, k: int, q: int, backend: str | None = None) -> complex:
    """Direct sum of ``e(k q f(a/q))`` over integers ``a`` with ``a/q`` in I."""
    if k < 1 or q < 1:
        raise ValueError("k and q must be positive")
    kern = _backend.get(backend)
    lo_n, lo_d, hi_n, hi_d = _rational_interval(curve.interval)
    if curve.exact_capable:
        nums, L = _exact_data(curve)
        return kern.exp_sum_exact(nums, L, lo_n, lo_d, hi_n, hi_d, int(k), int(q))
    params = np.asarray(curve.params, dtype=float)
    return kern.exp_sum_float(curve.code, params, curve.sign, lo_n, lo_d, hi_n, hi_d,
                              int(k), int(q))


def _panels(variation: float, node_cap: int) -> int:
    n = max(4, int(math.ceil(variation)) + 1)
    if n * GL_NODES > node_cap:
        raise ResourceError(
            f"quadrature needs {n * GL_NODES} nodes, above the cap of {node_cap}"
        )
    return n


def integrate_phase(phase, lo: float, hi: float, variation: float,
                    node_cap: int = NODE_CAP) -> complex:
    """Integral of ``e(phase(x))`` over ``[lo, hi]`` by panel Gauss-Legendre.

    ``variation`` is the total phase variation; one panel of
    ``GL_NODES`` nodes is used per unit.
    """
    n = _panels(variation, node_cap)
    h = (hi - lo) / n
    mids = lo + (np.arange(n) + 0.5) * h
    x = mids[:, None] + 0.5 * h * _GL_X[None, :]
    v = np.asarray(phase(x), dtype=float) * np.ones_like(x)
    v = v - np.floor(v)
    z = np.exp(2j * np.pi * v) @ _GL_W
    return complex(math.fsum((0.5 * h * z.real).tolist()), math.fsum((0.5 * h * z.imag).tolist()))


def phase_variation(curve: PlanarCurve, k: int, j: int, q: int) -> float:
    I = curve.interval.length()
    jlo, jhi = curve.dprime_range()
    fp = max(abs(jlo), abs(jhi))
    return q * (k * fp + abs(j)) * I + q * k * curve.c2 * I * I


def oscillatory_integral(curve: PlanarCurve, k: int, j: int, q: int,
                         node_cap: int = NODE_CAP, backend: str | None = None) -> complex:
    """``int_I e(q (k f(x) - j x)) dx``, without the leading factor ``q``."""
    if k < 1 or q < 1:
        raise ValueError("k and q must be positive")
    n = _panels(phase_variation(curve, k, j, q), node_cap)
    kern = _backend.get(backend)
    params = np.asarray(curve.params, dtype=float)
    return kern.gl_integrate(curve.code, params, curve.sign, float(curve.interval.lo),
                             float(curve.interval.hi), float(k), float(j), float(q), n,
                             _GL_X, _GL_W)


def _stationary_phase_mod1(curve: PlanarCurve, k: int, j: int, q: int, x0: float):
    """``q (k f(x0) - j x0) mod 1``, i.e. ``-q k f*(j/k) mod 1``."""
    coeffs = curve.exact_coeffs
    if coeffs is not None and len(coeffs) == 3:
        c0, c1, c2 = coeffs
        y = Fraction(j, k)
        x = (y - c1) / (2 * c2)
        fstar = y * x - (c0 + c1 * x + c2 * x * x)
        val = -q * k * fstar
        return float(val - math.floor(val))
    import mpmath

    with mpmath.workdps(50):
        y = mpmath.mpf(j) / k
        lo, hi = mpmath.mpf(repr(float(curve.interval.lo))), mpmath.mpf(repr(float(curve.interval.hi)))
        x = mpmath.mpf(repr(x0))
        # x0 is accurate to double precision; Newton doubles the digits each step
        for _ in range(4):
            x = min(max(x - (curve.f_mp(x, 1) - y) / curve.f_mp(x, 2), lo), hi)
        val = q * (k * curve.f_mp(x, 0) - j * x)
        return float(val - mpmath.floor(val))


def stationary_phase(curve: PlanarCurve, k: int, j: int, q: int) -> StationaryPhaseResult:
    """Leading stationary-phase term for ``int_I e(q (k f(x) - j x)) dx``.

    ``lambda = q k`` and ``phi = f - (j/k) x``; the critical point is
    ``x0 = h(j/k)``.  Raises :class:`StationaryPointError` unless ``j/k``
    lies in the open interior of ``J``.
    """
    jlo, jhi = curve.dprime_range()
    y = j / k
    if not (jlo < y < jhi):
        raise StationaryPointError(f"j/k = {y} not interior to J = [{jlo}, {jhi}]")
    x0 = float(dprime_inverse(curve, y))
    lo, hi = float(curve.interval.lo), float(curve.interval.hi)
    kappa = min(x0 - lo, hi - x0)
    if kappa <= 0:
        raise StationaryPointError("critical point on the boundary")
    lam = q * k
    phase = _stationary_phase_mod1(curve, k, j, q, x0)
    sgn = curve.curvature_sign
    value = e(phase + sgn / 8) / math.sqrt(lam * abs(float(curve.d2(x0))))
    budget = (1 / kappa + math.log(lam)) / lam
    return StationaryPhaseResult(value=value, x0=x0, kappa=kappa, error_budget=budget, phase=phase)


def poisson_expansion(curve: PlanarCurve, k: int, q: int, backend: str | None = None) -> complex:
    """Truncated Poisson side: ``sum_{j in J_k} q * oscillatory_integral``.

    ``J_k = [k min f' - 1, k max f' + 1]``.  Concave curves are handled by
    expanding ``-f`` and conjugating.
    """
    if curve.curvature_sign < 0:
        return poisson_expansion(curve.negated(), k, q, backend).conjugate()
    jlo, jhi = curve.dprime_range()
    j0 = math.ceil(k * jlo - 1 - 1e-12)
    j1 = math.floor(k * jhi + 1 + 1e-12)
    terms = [q * oscillatory_integral(curve, k, j, q, backend=backend) for j in range(j0, j1 + 1)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


# ---------------------------------------------------------------------------
# sequences, discrepancy, Erdos-Turan
# ---------------------------------------------------------------------------


def curve_sequence(curve: PlanarCurve, Q: int, cap: int = SEQUENCE_CAP,
                   backend: str | None = None) -> SequenceSample:
    """Fractional parts of ``q f(a/q)`` for ``q <= Q``, ``a/q`` in I, in (q, a) order."""
    if Q < 1:
        raise ValueError("Q must be positive")
    lo_n, lo_d, hi_n, hi_d = _rational_interval(curve.interval)
    lo, hi = curve.interval.frac_lo, curve.interval.frac_hi
    N = sum(math.floor(q * hi) - math.ceil(q * lo) + 1 for q in range(1, Q + 1))
    if N > cap:
        raise ResourceError(f"sequence length {N} exceeds cap {cap}")
    kern = _backend.get(backend)
    if curve.exact_capable:
        nums, L = _exact_data(curve)
        vals = kern.sequence_exact(nums, L, lo_n, lo_d, hi_n, hi_d, int(Q), N)
    else:
        params = np.asarray(curve.params, dtype=float)
        vals = kern.sequence_float(curve.code, params, curve.sign, lo_n, lo_d, hi_n, hi_d,
                                   int(Q), N)
    return SequenceSample(values=np.asarray(vals), N=N,
                          source={"curve": curve.spec_string(), "interval": str(curve.interval),
                                  "Q": int(Q)})


def weyl_sums(sample: SequenceSample, K: int, backend: str | None = None) -> np.ndarray:
    """``S_k = sum_n e(k u_n)`` for ``k = 1..K``."""
    return _backend.get(backend).weyl_sums(np.ascontiguousarray(sample.values, dtype=float), int(K))


def _check_window(alpha: float, beta: float) -> None:
    if not (alpha < beta < alpha + 1):
        raise ValueError("need alpha < beta < alpha + 1")


def erdos_turan_bound(sample: SequenceSample, K: int, alpha: float, beta: float,
                      weyl: np.ndarray | None = None) -> float:
    """``N/(K+1) + 2 sum_k b_k |S_k|`` with ``b_k = 1/(K+1) + min(beta - alpha, 1/(pi k))``.

    Pass precomputed ``weyl`` (length >= K) to reuse the sums across windows.
    """
    _check_window(alpha, beta)
    if K < 1:
        raise ValueError("K must be positive")
    S = weyl_sums(sample, K) if weyl is None else np.asarray(weyl)[:K]
    k = np.arange(1, K + 1)
    b = 1.0 / (K + 1) + np.minimum(beta - alpha, 1.0 / (np.pi * k))
    return sample.N / (K + 1) + 2.0 * math.fsum((b * np.abs(S)).tolist())


def window_count(values: np.ndarray, alpha: float, beta: float) -> int:
    """Exact number of values in the open window ``(alpha, beta)`` mod 1."""
    width = beta - alpha
    t = values - alpha
    t = t - np.floor(t)
    inside = (t > 0) & (t < width)
    # float decisions near an edge are redone in exact rational arithmetic
    near = (np.abs(t) < 1e-9) | (np.abs(t - width) < 1e-9) | (np.abs(t - 1) < 1e-9)
    if np.any(near):
        a, b = Fraction(alpha), Fraction(beta)
        w = b - a
        for idx in np.nonzero(near)[0]:
            tt = Fraction(float(values[idx])) - a
            tt -= math.floor(tt)
            inside[idx] = 0 < tt < w
    return int(np.count_nonzero(inside))


def discrepancy(sample: SequenceSample, alpha: float, beta: float) -> float:
    """``Z(N; alpha, beta) - (beta - alpha) N`` with ``Z`` counted exactly."""
    _check_window(alpha, beta)
    Z = window_count(np.asarray(sample.values, dtype=float), alpha, beta)
    return Z - (beta - alpha) * sample.N


def star_discrepancy(sample: SequenceSample) -> float:
    """``N * D*`` from the sorted-sample formula; the extreme discrepancy is at most twice this."""
    if sample.N < 1:
        raise ValueError("empty sample")
    x = np.sort(np.asarray(sample.values, dtype=float))
    N = x.size
    i = np.arange(1, N + 1)
    d = max(float(np.max(i / N - x)), float(np.max(x - (i - 1) / N)))
    return N * d


# ---------------------------------------------------------------------------
# sums over the dual curve
# ---------------------------------------------------------------------------


def dual_fraction_sum(dual: DualCurve, K1: int, K2: int, Q: int, s: float = 0.5,
               mode: str = "half") -> float:
    """Sums of ``k^-s ||k F(j/k)||^-e`` over ``K1 < k <= K2`` and ``j/k`` in J.

    ``half``: e = 1/2 over ``||k F|| > 1/Q``; ``one``: e = 1 over the same
    set; ``near``: ``k^-s`` over ``||k F|| <= 1/Q``.  ``F`` is the dual curve.
    """
    if mode not in ("half", "one", "near"):
        raise ValueError("mode must be half, one or near")
    if K2 <= K1:
        return 0.0
    jlo, jhi = float(dual.domain.lo), float(dual.domain.hi)
    slack = 1e-12 * max(1.0, abs(jlo), abs(jhi))
    thr = 1.0 / Q
    terms = []
    for k in range(K1 + 1, K2 + 1):
        j = np.arange(math.ceil(k * (jlo - slack)), math.floor(k * (jhi + slack)) + 1)
        if j.size == 0:
            continue
        F = np.atleast_1d(dual_eval(dual, j / k)[0])
        v = k * F
        dist = np.abs(v - np.round(v))
        far = dist > thr
        if mode == "near":
            terms.append(np.count_nonzero(~far) * k ** (-s))
        else:
            ex = 0.5 if mode == "half" else 1.0
            terms.extend((k ** (-s) * dist[far] ** (-ex)).tolist())
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# Fresnel normalization
# ---------------------------------------------------------------------------


def _fresnel_cumulative(T: float, panels_per_unit: int = 64):
    """Boundary grid ``t`` and ``int_0^t e(z^2) dz`` on it."""
    # z^2 varies by about 2 T per unit length; one panel per unit of variation suffices
    n = max(16, int(math.ceil(T * max(2 * T, 1) * 2)), int(T * panels_per_unit))
    h = T / n
    mids = (np.arange(n) + 0.5) * h
    x = mids[:, None] + 0.5 * h * _GL_X[None, :]
    v = x * x
    v = v - np.floor(v)
    z = 0.5 * h * (np.exp(2j * np.pi * v) @ _GL_W)
    grid = np.linspace(0.0, T, n + 1)
    return grid, np.concatenate([[0], np.cumsum(z)])


def fresnel_truncation(T: float) -> complex:
    """``int_0^T e(z^2) dz``."""
    return complex(_fresnel_cumulative(T)[1][-1])


def fresnel_average(T0: float = 10.0, T1: float = 20.0) -> complex:
    """Mean of the truncations ``int_0^T e(z^2) dz`` over ``T`` in ``[T0, T1]``.

    The truncation error oscillates like ``e(T^2) / T``, so the average
    converges to the full integral much faster than a single truncation.
    """
    grid, F = _fresnel_cumulative(T1)
    sel = grid >= T0
    g, f = grid[sel], F[sel]
    return complex(np.trapezoid(f, g) / (g[-1] - g[0]))
