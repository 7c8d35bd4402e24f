"""Acceptance criteria, runnable from pytest and from ``nearcurve verify``.

Each criterion returns a :class:`CriterionResult` with the measured values
it was judged on.  Tolerances are fixed here.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .constants import INV_ZETA3, SANDWICH_LOWER, SANDWICH_UPPER
from .counting import count_reduced, mobius_residual, on_curve_count_parabola
from .curves import dual_curve, dual_eval, double_dual_residual, make_curve, standard_curves, Interval
from .experiments import (
    ASYMPTOTIC_COLUMNS,
    asymptotic_sweep,
    discrepancy_sweep,
    error_exponent_fit,
    fermat_curve,
    loglog_fit,
    parabola_curve,
    sandwich_report,
    sp_error_sweep,
    write_csv,
)
from .harmonic import (
    SequenceSample,
    curve_sequence,
    discrepancy,
    erdos_turan_bound,
    exp_sum,
    fresnel_average,
    poisson_expansion,
    weyl_sums,
)

SEED = 20240601
RATIO_TOL = 0.10
SANDWICH_SLACK = 0.05
INVOLUTION_TOL = 1e-8
BAND_SLACK = 1e-9
SP_SLOPE_RANGE = (-1.25, -0.75)
SP_VALUE_TOL = 0.02
# Largest |exp_sum - poisson| / log(2 + k|J|) seen at first build was 0.757;
# the regression gate sits above it and below the initial gate of 10.
POISSON_CONSTANT = 1.0
DISCREPANCY_SLOPE_MAX = 0.8
FRESNEL_TOL = 1e-3


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"{status} [{self.number:2d}] {self.name} ({self.seconds:.1f}s): {vals}"


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# ---------------------------------------------------------------------------


def mobius_instances(n: int = 50, seed: int = SEED, Q_max: int = 300):
    rng = random.Random(seed)
    curves = list(standard_curves().items())
    out = []
    for _ in range(n):
        name, curve = curves[rng.randrange(len(curves))]
        Q = rng.randint(2, Q_max)
        r = rng.randint(1000, 1_000_000)
        p = rng.randint(1, r // 2)
        out.append((name, curve, Q, Fraction(p, r)))
    return out


def mobius_output(quick: bool = False, workers: int = 1) -> tuple[list[dict], bool]:
    rows = []
    ok = True
    for name, curve, Q, delta in mobius_instances(n=50, Q_max=150 if quick else 300):
        try:
            res = mobius_residual(curve, Q, delta, workers=workers)
            ties = 0
        except ArithmeticError as exc:
            res, ties = None, str(exc)
        ok &= res == 0
        rows.append({"curve": name, "Q": Q, "delta": str(delta), "residual": res, "ties": ties})
    return rows, ok


def crit_mobius(quick=False, workers=1):
    rows, ok = mobius_output(quick, workers)
    bad = [r for r in rows if r["residual"] != 0]
    return ok, {"instances": len(rows), "nonzero": len(bad)}


def _grid(quick):
    return [125, 250, 500, 1000] if quick else [500, 1000, 2000, 4000]


def sweep_output(mode: str, quick=False, workers=1):
    rows = asymptotic_sweep(parabola_curve(), mode, _grid(quick), Fraction(1, 5), workers=workers)
    return rows, write_csv(rows, ASYMPTOTIC_COLUMNS, timing=False)


def _trend_check(rows, target):
    first = abs(rows[0].ratio - target)
    last = abs(rows[-1].ratio - target)
    ties = sum(r.ties for r in rows)
    ok = last <= RATIO_TOL and last < first and ties == 0
    return ok, {"dev_first": first, "dev_last": last, "ratio_last": rows[-1].ratio, "ties": ties}


def crit_reduced_constant(quick=False, workers=1):
    rows, _ = sweep_output("reduced", quick, workers)
    return _trend_check([_scaled(r, INV_ZETA3) for r in rows], INV_ZETA3)


def _scaled(row, factor):
    # ratio against |I| delta Q^2 rather than the zeta-divided main term
    from dataclasses import replace

    return replace(row, ratio=row.ratio * factor)


def crit_raw_constant(quick=False, workers=1):
    rows, _ = sweep_output("raw", quick, workers)
    ok, m = _trend_check(rows, 1.0)
    fit = error_exponent_fit(rows)
    m["error_slope"] = fit.slope
    return ok, m


def crit_sandwich(quick=False, workers=1):
    Q = 1000 if quick else 4000
    rep = sandwich_report(parabola_curve(), Q, Fraction(1, 5), workers=workers)
    lo, hi = SANDWICH_LOWER - SANDWICH_SLACK, SANDWICH_UPPER + SANDWICH_SLACK
    ok = lo <= rep["observed_ratio"] <= hi and rep["ties"] == 0
    return ok, {"observed": rep["observed_ratio"], "lower": lo, "upper": hi,
                "conjectured": rep["conjectured"]}


def crit_floor_parabola(quick=False, workers=1):
    curve = parabola_curve()
    Qs = [100, 1000] if quick else [100, 1000, 10_000]
    m, ok = {}, True
    for Q in Qs:
        rep = count_reduced(curve, Q, Fraction(1, 10**9), workers=workers)
        on = on_curve_count_parabola(Q, curve.interval)
        ok &= rep.count == on and rep.exact and rep.ties == 0
        m[f"Q{Q}"] = f"{rep.count}/{on}"
    # independent oracle for Q = 100
    oracle = sum(1 for q in range(1, 11) for a in range(q, 2 * q + 1) if math.gcd(a, q) == 1)
    ok &= oracle == 33 and m["Q100"] == "33/33"
    return ok, m


def crit_floor_fermat(quick=False, workers=1):
    rep = count_reduced(fermat_curve(), 1000, 1e-8, workers=workers)
    return rep.count == 0 and rep.ties == 0, {"count": rep.count, "ties": rep.ties}


def crit_involution(quick=False, workers=1):
    worst, band_viol = 0.0, 0
    for name, curve in standard_curves().items():
        worst = max(worst, double_dual_residual(curve, 100))
        dual = dual_curve(curve)
        ys = np.linspace(float(dual.domain.lo), float(dual.domain.hi), 1000)
        d2 = np.abs(dual_eval(dual, ys)[2])
        band_viol += int(np.count_nonzero((d2 < 1 / curve.c2 - BAND_SLACK)
                                          | (d2 > 1 / curve.c1 + BAND_SLACK)))
    return worst < INVOLUTION_TOL and band_viol == 0, {"max_residual": worst,
                                                        "band_violations": band_viol}


def crit_stationary_phase(quick=False, workers=1):
    curve = make_curve("parabola", [0.5, 0, 0], Interval(-1, 1))
    rows = sp_error_sweep(curve, [100, 1000, 10_000, 100_000])
    fit = loglog_fit([r["lambda"] for r in rows], [r["abs_diff"] for r in rows])
    direct = complex(rows[0]["direct_re"], rows[0]["direct_im"])
    closed = complex(math.cos(math.pi / 4), math.sin(math.pi / 4)) / 10
    dev = abs(direct - closed)
    ok = SP_SLOPE_RANGE[0] <= fit.slope <= SP_SLOPE_RANGE[1] and dev <= SP_VALUE_TOL
    return ok, {"slope": fit.slope, "dev_at_100": dev}


def sqrt2_sample(N: int = 10_000) -> SequenceSample:
    n = np.arange(1, N + 1, dtype=float)
    return SequenceSample.from_values(n * math.sqrt(2), sequence="n*sqrt(2)")


def crit_erdos_turan(quick=False, workers=1):
    rng = np.random.default_rng(SEED)
    samples = [curve_sequence(parabola_curve(), 200), sqrt2_sample(10_000)]
    checks = violations = 0
    tightest = math.inf
    for sample in samples:
        S = weyl_sums(sample, 1000)
        for K in (10, 100, 1000):
            for _ in range(100):
                alpha = rng.uniform(-0.5, 0.5)
                beta = alpha + rng.uniform(1e-3, 1 - 1e-3)
                D = abs(discrepancy(sample, alpha, beta))
                B = erdos_turan_bound(sample, K, alpha, beta, weyl=S)
                checks += 1
                violations += D > B
                tightest = min(tightest, B - D)
    return violations == 0, {"checks": checks, "violations": violations, "min_slack": tightest}


def crit_poisson(quick=False, workers=1):
    curve = parabola_curve()
    jlo, jhi = curve.dprime_range()
    worst = 0.0
    for k in range(1, 11):
        for q in range(1, (21 if quick else 51)):
            d = exp_sum(curve, k, q)
            p = poisson_expansion(curve, k, q)
            worst = max(worst, abs(d - p) / math.log(2 + k * (jhi - jlo)))
    return worst <= POISSON_CONSTANT, {"max_scaled_diff": worst, "gate": POISSON_CONSTANT}


def crit_discrepancy(quick=False, workers=1):
    Qs = [100, 200, 400, 800] if quick else [200, 400, 800, 1600, 3200]
    rows = discrepancy_sweep(parabola_curve(), Qs)
    fit = error_exponent_fit(rows, "vs_N")
    return fit.slope <= DISCREPANCY_SLOPE_MAX, {"slope": fit.slope,
                                                 "D_over_N34_last": rows[-1]["D_over_N34"]}


def crit_fresnel(quick=False, workers=1):
    avg = fresnel_average(10.0, 20.0)
    dev = abs(avg - complex(0.25, 0.25))
    return dev <= FRESNEL_TOL, {"re": avg.real, "im": avg.imag, "dev": dev}


def determinism_output(quick=False, workers=1) -> str:
    mob, _ = mobius_output(quick, workers)
    _, red = sweep_output("reduced", quick, workers)
    _, raw = sweep_output("raw", quick, workers)
    return "\n".join(json.dumps(r) for r in mob) + "\n" + red + raw


def crit_determinism(quick=False, workers=1):
    one = determinism_output(quick, 1)
    eight = determinism_output(quick, 8)
    return one == eight, {"bytes": len(one), "identical": one == eight}


CRITERIA: list[tuple[int, str, Callable]] = [
    (1, "mobius", crit_mobius),
    (2, "reduced-constant", crit_reduced_constant),
    (3, "raw-constant", crit_raw_constant),
    (4, "sandwich", crit_sandwich),
    (5, "floor-parabola", crit_floor_parabola),
    (6, "floor-fermat", crit_floor_fermat),
    (7, "involution", crit_involution),
    (8, "stationary-phase", crit_stationary_phase),
    (9, "erdos-turan", crit_erdos_turan),
    (10, "poisson", crit_poisson),
    (11, "discrepancy", crit_discrepancy),
    (12, "fresnel", crit_fresnel),
    (13, "determinism", crit_determinism),
]


def run_criterion(number_or_name, quick: bool = False) -> CriterionResult:
    for number, name, fn in CRITERIA:
        if number_or_name in (number, name, str(number)):
            t0 = time.perf_counter()
            try:
                ok, measured = fn(quick=quick)
            except Exception as exc:  # reported as a failed criterion
                ok, measured = False, {"error": f"{type(exc).__name__}: {exc}"}
            return CriterionResult(number, name, bool(ok), measured, time.perf_counter() - t0)
    raise KeyError(f"unknown criterion {number_or_name!r}")


def run_all(quick: bool = False, only: str | None = None, echo=print) -> list[CriterionResult]:
    results = []
    for number, name, _ in CRITERIA:
        if only is not None and only not in (name, str(number)):
            continue
        res = run_criterion(number, quick)
        if echo:
            echo(res.line())
        results.append(res)
    return results
