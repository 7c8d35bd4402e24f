"""Evaluable planar curves with a certified curvature band, and their duals.

A curve is the graph of ``f`` on a compact interval ``I`` with
``c1 <= |f''| <= c2``.  Built-in families carry closed-form extrema for
the band; the ``fermat`` family is certified by dense sampling.

The dual (Legendre) curve is ``f*(y) = y h(y) - f(h(y))`` on
``J = [min f', max f']`` where ``h`` inverts ``f'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "FAMILIES",
    "FAMILY_CODES",
    "CurveError",
    "Interval",
    "PlanarCurve",
    "DualCurve",
    "make_curve",
    "parse_curve_spec",
    "parse_interval",
    "to_fraction",
    "dprime_inverse",
    "dual_curve",
    "dual_eval",
    "double_dual_residual",
    "standard_curves",
]

# safety factor applied to sampled (non closed-form) curvature bands
SAMPLING_SAFETY = 0.01
DEGENERATE_CURVATURE = 1e-9
BISECTION_REL_WIDTH = 1e-14
NEWTON_STEPS = 3


class CurveError(ValueError):
    """Invalid curve family, parameters, or interval."""


def to_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats go through their shortest repr.

    ``to_fraction(0.2) == Fraction(1, 5)``.  Strings accept ``p/q`` and
    decimal syntax.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    x = float(x)
    if not math.isfinite(x):
        raise CurveError(f"non-finite value {x!r}")
    return Fraction(repr(x))


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise CurveError("interval endpoints must be finite")
        if not lo < hi:
            raise CurveError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    def length(self) -> float:
        return float(self.hi) - float(self.lo)

    @property
    def frac_lo(self) -> Fraction:
        return to_fraction(self.lo)

    @property
    def frac_hi(self) -> Fraction:
        return to_fraction(self.hi)

    def exact_length(self) -> Fraction:
        return self.frac_hi - self.frac_lo

    def __str__(self) -> str:
        return f"{self.lo},{self.hi}"


# ---------------------------------------------------------------------------
# family evaluators: (params, x, lib) -> value, lib is numpy or mpmath-like
# ---------------------------------------------------------------------------


class _NumpyLib:
    exp = staticmethod(np.exp)
    log = staticmethod(np.log)
    sqrt = staticmethod(np.sqrt)

    @staticmethod
    def power(x, a):
        return np.power(x, a)


def _parabola(p, x, lib, n):
    a, b, c = p
    if n == 0:
        return (a * x + b) * x + c
    if n == 1:
        return 2 * a * x + b
    if n == 2:
        return 2 * a + 0 * x
    return 0 * x


def _power(p, x, lib, n):
    (alpha,) = p
    coef = 1.0
    for i in range(n):
        coef *= alpha - i
    e = alpha - n
    if float(e).is_integer():
        return coef * x ** int(e)
    return coef * lib.power(x, e)


def _circle(p, x, lib, n):
    (r,) = p
    s = r * r - x * x
    if n == 0:
        return lib.sqrt(s)
    if n == 1:
        return -x / lib.sqrt(s)
    if n == 2:
        return -r * r / (s * lib.sqrt(s))
    return -3 * r * r * x / (s * s * lib.sqrt(s))


def _exponential(p, x, lib, n):
    return lib.exp(x)


def _logarithm(p, x, lib, n):
    if n == 0:
        return lib.log(x)
    return [None, 1 / x, -1 / (x * x), 2 / (x * x * x)][n]


def _cubic(p, x, lib, n):
    c3, c2, c1, c0 = p
    if n == 0:
        return ((c3 * x + c2) * x + c1) * x + c0
    if n == 1:
        return (3 * c3 * x + 2 * c2) * x + c1
    if n == 2:
        return 6 * c3 * x + 2 * c2
    return 6 * c3 + 0 * x


def _fermat(p, x, lib, n):
    (k,) = p
    g = 1 - x**k
    if n == 0:
        return lib.power(g, 1.0 / k)
    if n == 1:
        return -(x ** (k - 1)) * lib.power(g, 1.0 / k - 1)
    if n == 2:
        return -(k - 1) * x ** (k - 2) * lib.power(g, 1.0 / k - 2)
    # f''' = -(k-1) x^(k-3) g^(1/k-3) [(k-2) g + (2k-1) x^k]
    return (
        -(k - 1)
        * x ** (k - 3)
        * lib.power(g, 1.0 / k - 3)
        * ((k - 2) * g + (2 * k - 1) * x**k)
    )


@dataclass(frozen=True)
class _Family:
    name: str
    code: int
    param_names: tuple[str, ...]
    defaults: tuple[float, ...]
    evaluate: Callable


FAMILIES: dict[str, _Family] = {
    f.name: f
    for f in (
        _Family("parabola", 0, ("a", "b", "c"), (1.0, 0.0, 0.0), _parabola),
        _Family("power", 1, ("alpha",), (2.0,), _power),
        _Family("circle-arc", 2, ("r",), (1.0,), _circle),
        _Family("exponential", 3, (), (), _exponential),
        _Family("logarithm", 4, (), (), _logarithm),
        _Family("cubic", 5, ("c3", "c2", "c1", "c0"), (1.0, 0.0, 0.0, 0.0), _cubic),
        _Family("fermat", 6, ("k",), (3.0,), _fermat),
    )
}
FAMILY_CODES = {name: fam.code for name, fam in FAMILIES.items()}
_ALIASES = {"circle": "circle-arc", "exp": "exponential", "log": "logarithm", "fermat3": "fermat"}


@dataclass(frozen=True)
class PlanarCurve:
    """Graph of ``sign * f_family`` on ``interval`` with certified band.

    ``exact_coeffs`` holds the ascending rational coefficients when the
    curve is a polynomial with rational coefficients (``exact_capable``).
    """

    family_id: str
    params: tuple[float, ...]
    interval: Interval
    c1: float
    c2: float
    lipschitz_C: float
    exact_capable: bool
    sign: int = 1
    exact_coeffs: tuple[Fraction, ...] | None = field(default=None, repr=False)
    band_source: str = "closed-form"

    @property
    def family(self) -> _Family:
        return FAMILIES[self.family_id]

    @property
    def code(self) -> int:
        return self.family.code

    def _eval(self, x, n, lib=_NumpyLib):
        return self.sign * self.family.evaluate(self.params, x, lib, n)

    def f(self, x):
        return self._eval(x, 0)

    def d1(self, x):
        return self._eval(x, 1)

    def d2(self, x):
        return self._eval(x, 2)

    def d3(self, x):
        return self._eval(x, 3)

    def f_mp(self, x, n: int = 0):
        """Evaluate derivative ``n`` in mpmath extended precision."""
        import mpmath

        params = tuple(mpmath.mpf(repr(p)) for p in self.params)
        return self.sign * self.family.evaluate(params, x, mpmath, n)

    @property
    def curvature_sign(self) -> int:
        mid = 0.5 * (float(self.interval.lo) + float(self.interval.hi))
        return 1 if float(self.d2(mid)) > 0 else -1

    def dprime_range(self) -> tuple[float, float]:
        lo, hi = float(self.d1(float(self.interval.lo))), float(self.d1(float(self.interval.hi)))
        return (lo, hi) if lo <= hi else (hi, lo)

    def negated(self) -> "PlanarCurve":
        coeffs = None if self.exact_coeffs is None else tuple(-c for c in self.exact_coeffs)
        return replace(self, sign=-self.sign, exact_coeffs=coeffs)

    def spec_string(self) -> str:
        fam = self.family
        kv = ",".join(f"{k}={v!r}" for k, v in zip(fam.param_names, self.params))
        s = f"{self.family_id}:{kv}" if kv else self.family_id
        return s if self.sign > 0 else "-" + s


def _check_domain(fam: _Family, params: tuple[float, ...], lo: float, hi: float) -> None:
    name = fam.name
    if name == "power":
        alpha = params[0]
        if alpha in (0.0, 1.0):
            raise CurveError("power family needs alpha not in {0, 1}: f'' vanishes")
        if not float(alpha).is_integer() and lo <= 0:
            raise CurveError("non-integer power needs interval in (0, inf)")
        if alpha < 3 and not float(alpha).is_integer() and lo <= 0:
            raise CurveError("power family domain violation")
    elif name == "circle-arc":
        r = params[0]
        if r <= 0:
            raise CurveError("circle-arc needs r > 0")
        if max(abs(lo), abs(hi)) > 0.9 * r:
            raise CurveError("circle-arc restricted to |x| <= 0.9 r")
    elif name == "logarithm":
        if lo <= 0:
            raise CurveError("logarithm needs interval in (0, inf)")
    elif name == "fermat":
        k = params[0]
        if not float(k).is_integer() or k < 3:
            raise CurveError("fermat family needs integer k >= 3")
        if lo <= 0 or hi >= 1:
            raise CurveError("fermat family needs interval inside (0, 1)")


def _candidates(lo: float, hi: float, extra: Sequence[float] = ()) -> np.ndarray:
    pts = [lo, hi] + [x for x in extra if lo < x < hi]
    return np.array(pts, dtype=float)


def _closed_form_band(fam: _Family, params, lo, hi):
    """Exact (c1, c2, C) for built-in families, or None if unavailable."""
    name = fam.name
    if name == "parabola":
        v = abs(2 * params[0])
        return v, v, 0.0
    if name == "cubic":
        c3, c2 = params[0], params[1]
        d2 = np.abs(6 * c3 * np.array([lo, hi]) + 2 * c2)
        return float(d2.min()), float(d2.max()), abs(6 * c3)
    if name in ("power", "circle-arc"):
        # |f''| and |f'''| are monotone in |x| for these families
        pts = _candidates(lo, hi, (0.0,))
        d2 = np.abs(fam.evaluate(params, pts, _NumpyLib, 2))
        d3 = np.abs(fam.evaluate(params, pts, _NumpyLib, 3))
        return float(d2.min()), float(d2.max()), float(d3.max())
    if name == "exponential":
        return math.exp(lo), math.exp(hi), math.exp(hi)
    if name == "logarithm":
        return 1 / (hi * hi), 1 / (lo * lo), 2 / lo**3
    return None


def _exact_coeffs(fam: _Family, params_raw) -> tuple[Fraction, ...] | None:
    """Ascending rational coefficients for polynomial families."""
    if fam.name == "parabola":
        a, b, c = (to_fraction(p) for p in params_raw)
        return (c, b, a)
    if fam.name == "cubic":
        c3, c2, c1, c0 = (to_fraction(p) for p in params_raw)
        if c3 == 0:
            return (c0, c1, c2)
        return (c0, c1, c2, c3)
    if fam.name == "power":
        alpha = to_fraction(params_raw[0])
        if alpha.denominator == 1 and alpha >= 2:
            return tuple([Fraction(0)] * int(alpha) + [Fraction(1)])
    return None


def make_curve(family_id: str, params: Sequence = (), interval: Interval | tuple = (0, 1),
               sampling_n: int = 1024) -> PlanarCurve:
    """Build a curve and certify its curvature band.

    ``c1``, ``c2`` and the Lipschitz constant of ``f''`` are estimated on
    ``sampling_n + 1`` equispaced points; built-in families then replace
    the estimate with closed-form extrema.  Raises :class:`CurveError` for
    domain violations, sign changes of ``f''`` or degenerate curvature.
    """
    family_id = _ALIASES.get(family_id, family_id)
    if family_id not in FAMILIES:
        raise CurveError(f"unknown family {family_id!r}; valid families: {', '.join(FAMILIES)}")
    fam = FAMILIES[family_id]
    if not isinstance(interval, Interval):
        interval = Interval(*interval)
    if sampling_n < 64:
        raise CurveError("sampling_n must be >= 64")
    params_raw = tuple(params) if len(params) else fam.defaults
    if len(params_raw) != len(fam.param_names):
        raise CurveError(
            f"{family_id} expects {len(fam.param_names)} params {fam.param_names}, got {len(params_raw)}"
        )
    pf = tuple(float(to_fraction(p)) if isinstance(p, str) else float(p) for p in params_raw)
    lo, hi = float(interval.lo), float(interval.hi)
    _check_domain(fam, pf, lo, hi)

    xs = np.linspace(lo, hi, sampling_n + 1)
    with np.errstate(all="ignore"):
        d2 = np.asarray(fam.evaluate(pf, xs, _NumpyLib, 2), dtype=float) * np.ones_like(xs)
    if not np.all(np.isfinite(d2)):
        raise CurveError(f"{family_id}: f'' not finite on [{lo}, {hi}]")
    if np.any(np.abs(d2) < DEGENERATE_CURVATURE):
        raise CurveError(f"{family_id}: degenerate curvature (|f''| < 1e-9) on [{lo}, {hi}]")
    if np.any(np.sign(d2) != np.sign(d2[0])):
        raise CurveError(f"{family_id}: f'' changes sign on [{lo}, {hi}]")

    band = _closed_form_band(fam, pf, lo, hi)
    if band is None:
        ad2 = np.abs(d2)
        c1 = float(ad2.min()) * (1 - SAMPLING_SAFETY)
        c2 = float(ad2.max()) * (1 + SAMPLING_SAFETY)
        C = float(np.max(np.abs(np.diff(d2)) / np.diff(xs))) * (1 + SAMPLING_SAFETY)
        source = "sampled"
    else:
        c1, c2, C = band
        source = "closed-form"
    coeffs = _exact_coeffs(fam, params_raw)
    return PlanarCurve(
        family_id=family_id,
        params=pf,
        interval=interval,
        c1=c1,
        c2=c2,
        lipschitz_C=C,
        exact_capable=coeffs is not None,
        exact_coeffs=coeffs,
        band_source=source,
    )


def parse_interval(text: str) -> Interval:
    parts = text.split(",")
    if len(parts) != 2:
        raise CurveError(f"interval must be LO,HI, got {text!r}")
    lo, hi = (p.strip() for p in parts)
    # keep exact rationals for p/q endpoints
    conv = [to_fraction(v) if "/" in v else float(v) for v in (lo, hi)]
    return Interval(*conv)


def parse_curve_spec(spec: str, interval: Interval | str) -> PlanarCurve:
    """Parse ``family:key=val,key=val`` into a curve on ``interval``."""
    if isinstance(interval, str):
        interval = parse_interval(interval)
    name, _, rest = spec.partition(":")
    name = _ALIASES.get(name.strip(), name.strip())
    if name not in FAMILIES:
        raise CurveError(f"unknown family {name!r}; valid families: {', '.join(FAMILIES)}")
    fam = FAMILIES[name]
    values = dict(zip(fam.param_names, fam.defaults))
    if rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            key = key.strip()
            if not eq or key not in values:
                raise CurveError(
                    f"bad parameter {item!r} for {name}; expected keys {fam.param_names}"
                )
            values[key] = val.strip()
    params = [values[k] for k in fam.param_names]
    return make_curve(name, params, interval)


def standard_curves() -> dict[str, PlanarCurve]:
    """Built-in families on their standard test intervals."""
    return {
        "parabola": make_curve("parabola", [1, 0, 0], Interval(1, 2)),
        "half-parabola": make_curve("parabola", [0.5, 0, 0], Interval(-1, 1)),
        "power": make_curve("power", [3], Interval(1, 2)),
        "power-frac": make_curve("power", [1.5], Interval(1, 2)),
        "circle-arc": make_curve("circle-arc", [1], Interval(-0.5, 0.5)),
        "exponential": make_curve("exponential", [], Interval(0, 1)),
        "logarithm": make_curve("logarithm", [], Interval(1, 2)),
        "cubic": make_curve("cubic", [1, 0, 1, 0], Interval(1, 2)),
        "fermat": make_curve("fermat", [3], Interval(0.2, 0.8)),
    }


# ---------------------------------------------------------------------------
# inverse of f' and the dual curve
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualCurve:
    base: PlanarCurve
    domain: Interval
    inverse_solver_tolerance: float = 1e-12

    def h(self, y):
        return dprime_inverse(self.base, y)

    def f(self, y):
        return dual_eval(self, y)[0]

    def d1(self, y):
        return dual_eval(self, y)[1]

    def d2(self, y):
        return dual_eval(self, y)[2]


def _inverse_monotone(g, dg, lo: float, hi: float, y, increasing: bool):
    """Vectorized bisection + Newton for ``g(x) = y`` on ``[lo, hi]``."""
    y = np.asarray(y, dtype=float)
    a = np.full(y.shape, lo)
    b = np.full(y.shape, hi)
    width = BISECTION_REL_WIDTH * (hi - lo)
    # bisection halves each step; this bound reaches the target width
    steps = int(math.ceil(math.log2((hi - lo) / width))) + 1
    for _ in range(steps):
        m = 0.5 * (a + b)
        gm = g(m)
        below = (gm < y) if increasing else (gm > y)
        a = np.where(below, m, a)
        b = np.where(below, b, m)
    x = 0.5 * (a + b)
    for _ in range(NEWTON_STEPS):
        step = (g(x) - y) / dg(x)
        x_new = np.clip(x - step, lo, hi)
        x = np.where(np.isfinite(x_new), x_new, x)
    return x


def dprime_inverse(curve: PlanarCurve, y, tol: float = 1e-12):
    """Solve ``f'(x) = y`` on the curve's interval.

    Raises :class:`ValueError` when ``y`` is outside ``[min f', max f']``.
    """
    jlo, jhi = curve.dprime_range()
    ya = np.asarray(y, dtype=float)
    slack = 1e-12 * max(1.0, abs(jlo), abs(jhi))
    if np.any(ya < jlo - slack) or np.any(ya > jhi + slack):
        raise ValueError(f"y outside J = [{jlo}, {jhi}]")
    ya = np.clip(ya, jlo, jhi)
    lo, hi = float(curve.interval.lo), float(curve.interval.hi)
    x = _inverse_monotone(curve.d1, curve.d2, lo, hi, ya, curve.curvature_sign > 0)
    resid = np.abs(curve.d1(x) - ya)
    if np.any(resid > tol * np.maximum(1.0, np.abs(ya)) * 1e3):
        raise ArithmeticError("f' inversion did not converge")
    return float(x) if np.ndim(x) == 0 else x


def dual_curve(curve: PlanarCurve, tol: float = 1e-12) -> DualCurve:
    jlo, jhi = curve.dprime_range()
    return DualCurve(base=curve, domain=Interval(jlo, jhi), inverse_solver_tolerance=tol)


def dual_eval(dual: DualCurve, y):
    """Return ``(f*(y), (f*)'(y), (f*)''(y))``; arrays broadcast."""
    base = dual.base
    x = dprime_inverse(base, y, dual.inverse_solver_tolerance)
    ya = np.clip(np.asarray(y, dtype=float), float(dual.domain.lo), float(dual.domain.hi))
    fstar = ya * x - base.f(x)
    d2 = 1.0 / base.d2(x)
    if np.ndim(fstar) == 0:
        return float(fstar), float(x), float(d2)
    return fstar, x, d2


def double_dual_residual(curve: PlanarCurve, grid_n: int = 100) -> float:
    """max |f**(x) - f(x)| over an interior grid of the curve's interval.

    ``f**(x) = x g(x) - f*(g(x))`` where ``g`` inverts ``(f*)' = h``, found
    by bisection on ``h`` over the dual domain shrunk by ``1e-3 |J|``.
    """
    if grid_n < 16:
        raise ValueError("grid_n must be >= 16")
    dual = dual_curve(curve)
    jlo, jhi = float(dual.domain.lo), float(dual.domain.hi)
    shrink = 1e-3 * (jhi - jlo)
    jlo, jhi = jlo + shrink, jhi - shrink
    # x grid: interior of the image of (f*)' over the shrunk dual domain
    xlo, xhi = sorted((float(dprime_inverse(curve, jlo)), float(dprime_inverse(curve, jhi))))
    xs = np.linspace(xlo, xhi, grid_n + 2)[1:-1]
    # (f*)' = h is increasing iff f'' > 0
    ys = _inverse_monotone(dual.h, dual.d2, jlo, jhi, xs, curve.curvature_sign > 0)
    fstar, _, _ = dual_eval(dual, ys)
    fss = xs * ys - fstar
    return float(np.max(np.abs(fss - curve.f(xs))))
