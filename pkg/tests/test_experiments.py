import math
from fractions import Fraction

import pytest

from nearcurve.constants import INV_ZETA3
from nearcurve.curves import Interval, make_curve
from nearcurve.experiments import (
    ASYMPTOTIC_COLUMNS,
    FLOOR_COLUMNS,
    FitError,
    SweepRow,
    asymptotic_sweep,
    discrepancy_sweep,
    error_exponent_fit,
    floor_experiment,
    loglog_fit,
    parabola_curve,
    sandwich_report,
    sp_error_sweep,
    svg_loglog,
    write_csv,
)


def _rows(errors):
    return [SweepRow(Q=Q, delta=0.2, mode="raw", count=0, main_term=0.0, ratio=0.0, abs_error=err)
            for Q, err in errors]


def test_fit_synthetic():
    fit = error_exponent_fit(_rows([(Q, Q**1.5) for Q in (100, 200, 400, 800)]))
    assert fit.slope == pytest.approx(1.5, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.n_points == 4


def test_fit_excludes_zero_error():
    fit = error_exponent_fit(_rows([(10, 0.0), (100, 1.0), (1000, 10.0), (10_000, 100.0)]))
    assert fit.excluded == 1 and fit.slope == pytest.approx(1.0)


@pytest.mark.parametrize("errors", [[(Q, 0.0) for Q in (1, 2, 3, 4)], [(10, 1.0)]])
def test_fit_insufficient(errors):
    with pytest.raises(FitError, match="insufficient data"):
        error_exponent_fit(_rows(errors))


def test_fit_vs_N_drops_small_samples():
    rows = [{"N": N, "D_surrogate": N**0.75} for N in (5, 100, 1000, 10_000)]
    fit = error_exponent_fit(rows, "vs_N")
    assert fit.excluded == 1 and fit.slope == pytest.approx(0.75)


def test_asymptotic_sweep_rows():
    rows = asymptotic_sweep(parabola_curve(), "reduced", [100, 200], Fraction(1, 5))
    for r in rows:
        assert r.abs_error == pytest.approx(abs(r.count - r.main_term))
        assert r.ratio * r.main_term == pytest.approx(r.count)
        assert r.main_term == pytest.approx(INV_ZETA3 * 0.2 * r.Q**2)
    single = asymptotic_sweep(parabola_curve(), "raw", [50])
    assert len(single) == 1
    with pytest.raises(FitError):
        error_exponent_fit(single)
    with pytest.raises(ValueError):
        asymptotic_sweep(parabola_curve(), "raw", [200, 100])


def test_power_delta_rule():
    rows = asymptotic_sweep(parabola_curve(), "raw", [16, 64], ("power", -0.5))
    assert [r.delta for r in rows] == [0.25, 0.125]


def test_sandwich_constants_and_small_case():
    rep = sandwich_report(make_curve("parabola", [1, 0, 0], Interval(0, 1)), 2, 0.5)
    assert rep["lower_const"] == pytest.approx(rep["upper_const"] * 2 * math.sqrt(3) / 9)
    assert rep["conjectured"] == pytest.approx(2 * rep["upper_const"] / 3)
    assert rep["observed_ratio"] == 1.0


def test_floor_experiment():
    rows = floor_experiment("parabola", [100], [Fraction(1, 10**9), Fraction(2, 5)])
    assert (rows[0]["count"], rows[0]["on_curve_count"]) == (33, 33)
    assert rows[1]["count"] > 33
    rows = floor_experiment("fermat3", [1000], [1e-8])
    assert rows[0]["count"] == 0 and rows[0]["on_curve_count"] == 0


def test_discrepancy_sweep_columns():
    rows = discrepancy_sweep(parabola_curve(), [10, 20])
    assert rows[0]["N"] == sum(q + 1 for q in range(1, 11))
    assert rows[1]["D_over_N34"] == pytest.approx(rows[1]["D_surrogate"] / rows[1]["N"] ** 0.75)


def test_sp_error_sweep_within_budget():
    rows = sp_error_sweep(make_curve("parabola", [0.5, 0, 0], Interval(-1, 1)), [100, 1000])
    assert all(r["abs_diff"] <= r["budget"] for r in rows)


def test_csv_fixed_order_and_timing():
    rows = asymptotic_sweep(parabola_curve(), "raw", [20, 40], Fraction(1, 5))
    text = write_csv(rows, ASYMPTOTIC_COLUMNS, timing=False)
    lines = text.splitlines()
    assert lines[0] == ",".join(ASYMPTOTIC_COLUMNS)
    assert all(line.endswith(",0.0") for line in lines[1:])
    assert text == write_csv(rows, ASYMPTOTIC_COLUMNS, timing=False)
    assert write_csv([{"Q": 1, "delta": "1/5", "count": 2, "on_curve_count": 2, "ties": 0}],
                     FLOOR_COLUMNS).splitlines()[1] == "1,1/5,2,2,0"


def test_svg():
    svg = svg_loglog({"a": ([1, 10, 100], [1, 5, 25])}, title="t")
    assert svg.startswith("<svg") and "polyline" in svg
    with pytest.raises(ValueError):
        svg_loglog({"a": ([0], [0])})


def test_loglog_fit_direct():
    fit = loglog_fit([1, 2, 4, 8], [3, 6, 12, 24])
    assert fit.slope == pytest.approx(1.0) and fit.intercept == pytest.approx(math.log(3))


def test_floor_monotone_in_delta():
    deltas = [Fraction(2, 5), Fraction(1, 10), Fraction(1, 100), Fraction(1, 10**4),
              Fraction(1, 10**5), Fraction(1, 10**9)]
    counts = [r["count"] for r in floor_experiment("parabola", [300], deltas)]
    assert counts == sorted(counts, reverse=True)
    # every delta below 1/Q^2 sits on the on-curve floor
    assert counts[-2:] == [rows["on_curve_count"] for rows in floor_experiment(
        "parabola", [300], deltas[-2:])]
