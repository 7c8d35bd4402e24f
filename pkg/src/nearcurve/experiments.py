"""Desk-scale sweeps: asymptotic ratios, sandwich constants, the on-curve
floor, discrepancy growth and stationary-phase error decay.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .constants import CONJECTURED_TILDE, SANDWICH_LOWER, SANDWICH_UPPER
from .counting import count, count_reduced, count_tilde, on_curve_count_parabola
from .curves import Interval, PlanarCurve, make_curve
from .harmonic import (
    SequenceSample,
    curve_sequence,
    oscillatory_integral,
    star_discrepancy,
    stationary_phase,
)

__all__ = [
    "SweepRow",
    "FitResult",
    "FitError",
    "asymptotic_sweep",
    "error_exponent_fit",
    "loglog_fit",
    "sandwich_report",
    "floor_experiment",
    "discrepancy_sweep",
    "sp_error_sweep",
    "write_csv",
    "svg_loglog",
    "fermat_curve",
    "parabola_curve",
]


class FitError(ValueError):
    """Too few usable rows for a log-log fit."""


@dataclass(frozen=True)
class SweepRow:
    Q: int
    delta: object
    mode: str
    count: int
    main_term: float
    ratio: float
    abs_error: float
    wall_ms: float = 0.0
    ties: int = 0


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    excluded: int = 0


def parabola_curve() -> PlanarCurve:
    return make_curve("parabola", [1, 0, 0], Interval(1, 2))


def fermat_curve() -> PlanarCurve:
    return make_curve("fermat", [3], Interval(0.2, 0.8))


def _delta_for(rule, Q: int):
    if callable(rule):
        return rule(Q)
    if isinstance(rule, tuple) and rule[0] == "power":
        return float(Q) ** rule[1]
    return rule


def asymptotic_sweep(curve: PlanarCurve, mode: str, Q_list: Sequence[int],
                     delta_rule=Fraction(1, 5), workers: int = 1,
                     backend: str | None = None) -> list[SweepRow]:
    """One row per ``Q``; ``delta_rule`` is a fixed delta, ``("power", p)`` for
    ``delta = Q^p``, or a callable of ``Q``."""
    Qs = list(Q_list)
    if Qs != sorted(Qs) or any(Q < 2 for Q in Qs):
        raise ValueError("Q_list must be ascending with every Q >= 2")
    rows = []
    for Q in Qs:
        delta = _delta_for(delta_rule, Q)
        rep = count(curve, Q, delta, mode, workers=workers, backend=backend)
        rows.append(SweepRow(Q=Q, delta=delta, mode=mode, count=rep.count,
                             main_term=rep.main_term, ratio=rep.ratio,
                             abs_error=abs(rep.count - rep.main_term),
                             wall_ms=rep.wall_ms, ties=rep.ties))
    return rows


def loglog_fit(x: Iterable[float], y: Iterable[float]) -> FitResult:
    """Least squares of ``log y`` against ``log x``; non-positive ``y`` excluded."""
    x = np.asarray(list(x), dtype=float)
    y = np.asarray(list(y), dtype=float)
    keep = (y > 0) & (x > 0)
    excluded = int(np.count_nonzero(~keep))
    if np.count_nonzero(keep) < 3:
        raise FitError("insufficient data: need >= 3 rows with positive values")
    lx, ly = np.log(x[keep]), np.log(y[keep])
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    pred = A @ np.array([slope, intercept])
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1 - ss_res / ss_tot))
    return FitResult(float(slope), float(intercept), r2, int(keep.sum()), excluded)


def error_exponent_fit(rows: Sequence, model: str = "vs_Q") -> FitResult:
    """Slope of ``log abs_error`` against ``log Q`` (``vs_Q``) or ``log N`` (``vs_N``).

    Rows with zero error, or ``N < 10`` for ``vs_N``, are excluded and counted.
    """
    if model == "vs_Q":
        xs = [r.Q for r in rows]
        ys = [r.abs_error for r in rows]
    elif model == "vs_N":
        xs = [r["N"] if r["N"] >= 10 else 0 for r in rows]
        ys = [r["D_surrogate"] for r in rows]
    else:
        raise ValueError("model must be vs_Q or vs_N")
    return loglog_fit(xs, ys)


def sandwich_report(curve: PlanarCurve, Q: int, delta, workers: int = 1) -> dict:
    """Observed ``count_tilde / (|I| delta Q^2)`` against the proven and conjectured constants."""
    rep = count_tilde(curve, Q, delta, workers=workers)
    observed = rep.count / (curve.interval.length() * float(delta) * Q * Q)
    return {
        "Q": Q,
        "delta": str(delta),
        "count": rep.count,
        "lower_const": SANDWICH_LOWER,
        "upper_const": SANDWICH_UPPER,
        "observed_ratio": observed,
        "conjectured": CONJECTURED_TILDE,
        "ties": rep.ties,
    }


def floor_experiment(kind: str, Q_list: Sequence[int], delta_list: Sequence,
                     workers: int = 1) -> list[dict]:
    """Reduced counts at small delta next to the number of points on the curve.

    ``parabola``: y = x^2 on [1, 2]; ``fermat3``: (1 - x^3)^(1/3) on
    [1/5, 4/5], which carries no rational points.
    """
    if kind == "parabola":
        curve = parabola_curve()
    elif kind in ("fermat3", "fermat"):
        curve = fermat_curve()
    else:
        raise ValueError("kind must be parabola or fermat3")
    rows = []
    for Q in Q_list:
        for delta in delta_list:
            rep = count_reduced(curve, Q, delta, workers=workers)
            on = on_curve_count_parabola(Q, curve.interval) if kind == "parabola" else 0
            rows.append({"Q": Q, "delta": str(delta), "count": rep.count,
                         "on_curve_count": on, "ties": rep.ties})
    return rows


def discrepancy_sweep(curve: PlanarCurve, Q_list: Sequence[int],
                      sample_fn: Callable[[PlanarCurve, int], SequenceSample] | None = None
                      ) -> list[dict]:
    """``D_surrogate = 2 N D*`` of the curve sequence and its ratio to ``N^(3/4)``."""
    sample_fn = sample_fn or curve_sequence
    rows = []
    for Q in Q_list:
        sample = sample_fn(curve, Q)
        D = 2.0 * star_discrepancy(sample)
        rows.append({"Q": Q, "N": sample.N, "D_surrogate": D,
                     "D_over_N34": D / sample.N ** 0.75})
    return rows


def sp_error_sweep(curve: PlanarCurve, lambda_list: Sequence[int], j: int = 0) -> list[dict]:
    """Direct quadrature against the stationary-phase term with ``k = 1, q = lambda``."""
    rows = []
    for lam in lambda_list:
        direct = oscillatory_integral(curve, 1, j, int(lam))
        sp = stationary_phase(curve, 1, j, int(lam))
        rows.append({"lambda": int(lam), "direct_re": direct.real, "direct_im": direct.imag,
                     "sp_re": sp.value.real, "sp_im": sp.value.imag,
                     "abs_diff": abs(direct - sp.value), "budget": sp.error_budget})
    return rows


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

ASYMPTOTIC_COLUMNS = ["Q", "delta", "mode", "count", "main_term", "ratio", "abs_error", "wall_ms"]
DISCREPANCY_COLUMNS = ["Q", "N", "D_surrogate", "D_over_N34"]
SP_COLUMNS = ["lambda", "direct_re", "direct_im", "sp_re", "sp_im", "abs_diff", "budget"]
FLOOR_COLUMNS = ["Q", "delta", "count", "on_curve_count", "ties"]
SANDWICH_COLUMNS = ["Q", "delta", "count", "lower_const", "upper_const", "observed_ratio",
                    "conjectured", "ties"]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows: Sequence, columns: Sequence[str], timing: bool = True) -> str:
    """Serialize rows (dicts or dataclasses) to CSV text with fixed column order.

    ``timing=False`` writes ``wall_ms`` as 0 so output bytes are reproducible.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        d = asdict(r) if hasattr(r, "__dataclass_fields__") else dict(r)
        if not timing and "wall_ms" in d:
            d["wall_ms"] = 0.0
        w.writerow([_fmt(d[c]) for c in columns])
    return buf.getvalue()


def svg_loglog(series: dict[str, tuple[Sequence[float], Sequence[float]]], title: str = "",
               xlabel: str = "x", ylabel: str = "y", width: int = 480, height: int = 320) -> str:
    """Minimal self-contained log-log line chart."""
    pts = [(x, y) for xs, ys in series.values() for x, y in zip(xs, ys) if x > 0 and y > 0]
    if not pts:
        raise ValueError("nothing positive to plot")
    lx = [math.log10(x) for x, _ in pts]
    ly = [math.log10(y) for _, y in pts]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1
    m = 50

    def sx(x):
        return m + (math.log10(x) - x0) / (x1 - x0) * (width - 2 * m)

    def sy(y):
        return height - m - (math.log10(y) - y0) / (y1 - y0) * (height - 2 * m)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" style="fill:#ffffff"/>',
        f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" style="stroke:#000"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" style="stroke:#000"/>',
        f'<text x="{width / 2:.1f}" y="20" style="font:12px sans-serif;text-anchor:middle">{title}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 10}" style="font:11px sans-serif;text-anchor:middle">'
        f"log10 {xlabel}</text>",
        f'<text x="12" y="{height / 2:.1f}" style="font:11px sans-serif">log10 {ylabel}</text>',
        f'<text x="{m}" y="{height - m + 14}" style="font:10px sans-serif">{x0:.2f}</text>',
        f'<text x="{width - m}" y="{height - m + 14}" style="font:10px sans-serif;text-anchor:end">'
        f"{x1:.2f}</text>",
        f'<text x="{m - 4}" y="{height - m}" style="font:10px sans-serif;text-anchor:end">{y0:.2f}</text>',
        f'<text x="{m - 4}" y="{m + 4}" style="font:10px sans-serif;text-anchor:end">{y1:.2f}</text>',
    ]
    for i, (name, (xs, ys)) in enumerate(series.items()):
        c = colors[i % len(colors)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if x > 0 and y > 0)
        out.append(f'<polyline points="{coords}" style="fill:none;stroke:{c};stroke-width:1.5"/>')
        out.append(f'<text x="{width - m}" y="{m + 14 * i}" style="font:11px sans-serif;'
                   f'text-anchor:end;fill:{c}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
