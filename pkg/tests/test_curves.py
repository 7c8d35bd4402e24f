import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nearcurve.curves import (
    CurveError,
    Interval,
    dprime_inverse,
    double_dual_residual,
    dual_curve,
    dual_eval,
    make_curve,
    parse_curve_spec,
    parse_interval,
    standard_curves,
    to_fraction,
)


def test_parabola_band():
    c = make_curve("parabola", [1, 0, 0], Interval(1, 2))
    assert (c.c1, c.c2, c.lipschitz_C) == (2, 2, 0)
    assert c.exact_capable
    assert c.exact_coeffs == (0, 0, 1)


def test_cubic_power_band():
    c = make_curve("power", [3], Interval(1, 2))
    assert c.c1 == pytest.approx(6)
    assert c.c2 == pytest.approx(12)
    assert c.lipschitz_C == pytest.approx(6)


@pytest.mark.parametrize("fam,params,iv", [
    ("power", [3], (-1, 1)),
    ("parabola", [0, 1, 0], (0, 1)),
    ("circle-arc", [1], (0, 0.95)),
    ("logarithm", [], (-1, 1)),
    ("nope", [], (0, 1)),
    ("parabola", [1, 0], (0, 1)),
])
def test_make_curve_rejects(fam, params, iv):
    with pytest.raises(CurveError):
        make_curve(fam, params, iv)


def test_interval_rejects_empty():
    with pytest.raises(CurveError):
        Interval(2, 1)


def test_to_fraction():
    assert to_fraction(0.2) == Fraction(1, 5)
    assert to_fraction("3/7") == Fraction(3, 7)
    assert to_fraction(4) == 4


def test_parse_spec_and_interval():
    c = parse_curve_spec("cubic:c3=1,c1=1", "1,2")
    assert c.params == (1.0, 0.0, 1.0, 0.0)
    assert parse_interval("1/5,4/5").frac_lo == Fraction(1, 5)
    with pytest.raises(CurveError):
        parse_curve_spec("parabola:z=1", "1,2")


@pytest.mark.parametrize("fam,params,iv,y,x", [
    ("parabola", [1, 0, 0], (1, 2), 3, 1.5),
    ("power", [3], (1, 2), 12, 2.0),
    ("exponential", [], (0, 1), 2, math.log(2)),
])
def test_dprime_inverse(fam, params, iv, y, x):
    assert dprime_inverse(make_curve(fam, params, iv), y) == pytest.approx(x, abs=1e-12)


def test_dprime_inverse_out_of_range():
    with pytest.raises(ValueError):
        dprime_inverse(make_curve("parabola", [1, 0, 0], (1, 2)), 5)


@pytest.mark.parametrize("fam,params,iv,y,expected", [
    ("parabola", [0.5, 0, 0], (-1, 1), 0.5, (0.125, 0.5, 1.0)),
    ("parabola", [1, 0, 0], (1, 2), 3, (2.25, 1.5, 0.5)),
    ("exponential", [], (0, 1), 2, (2 * math.log(2) - 2, math.log(2), 0.5)),
])
def test_dual_eval(fam, params, iv, y, expected):
    got = dual_eval(dual_curve(make_curve(fam, params, iv)), y)
    assert got == pytest.approx(expected, abs=1e-12)


def test_half_parabola_self_dual():
    c = make_curve("parabola", [0.5, 0, 0], (-1, 1))
    assert double_dual_residual(c, 100) < 1e-10
    ys = np.linspace(-0.9, 0.9, 19)
    assert np.allclose(dual_eval(dual_curve(c), ys)[0], c.f(ys), atol=1e-12)


@pytest.mark.parametrize("name", list(standard_curves()))
def test_involution_and_dual_band(name):
    c = standard_curves()[name]
    assert double_dual_residual(c, 100) < 1e-8
    d = dual_curve(c)
    ys = np.linspace(d.domain.lo, d.domain.hi, 200)
    d2 = np.abs(dual_eval(d, ys)[2])
    assert np.all(d2 >= 1 / c.c2 - 1e-9) and np.all(d2 <= 1 / c.c1 + 1e-9)


def test_fermat_band_is_sampled():
    c = standard_curves()["fermat"]
    assert c.band_source == "sampled"
    xs = np.linspace(0.2, 0.8, 5001)
    d2 = np.abs(c.d2(xs))
    assert c.c1 <= d2.min() and d2.max() <= c.c2


def test_mp_matches_float():
    c = standard_curves()["fermat"]
    for n in range(3):
        assert float(c.f_mp(0.37, n)) == pytest.approx(float(c._eval(0.37, n)), rel=1e-12)


def test_negated_flips_sign():
    c = standard_curves()["cubic"]
    n = c.negated()
    assert n.f(1.3) == -c.f(1.3)
    assert n.curvature_sign == -c.curvature_sign
    assert n.exact_coeffs == tuple(-x for x in c.exact_coeffs)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.1, 5), b=st.floats(-3, 3), lo=st.floats(-3, 3), w=st.floats(0.1, 3))
def test_parabola_dual_closed_form(a, b, lo, w):
    # f = a x^2 + b x has f*(y) = (y - b)^2 / (4a)
    c = make_curve("parabola", [a, b, 0], Interval(lo, lo + w))
    d = dual_curve(c)
    y = 0.5 * (d.domain.lo + d.domain.hi)
    fs, x, d2 = dual_eval(d, y)
    assert fs == pytest.approx((y - b) ** 2 / (4 * a), rel=1e-9, abs=1e-9)
    assert d2 == pytest.approx(1 / (2 * a), rel=1e-12)


@pytest.mark.parametrize("name", list(standard_curves()))
def test_inverse_roundtrip(name):
    c = standard_curves()[name]
    lo, hi = c.interval.lo, c.interval.hi
    xs = np.linspace(lo, hi, 203)[1:-1]
    back = dprime_inverse(c, c.d1(xs))
    assert np.all(np.abs(back - xs) <= 1e-10 * np.maximum(1, np.abs(xs)))


@pytest.mark.parametrize("name", list(standard_curves()))
def test_dual_derivative_finite_difference(name):
    d = dual_curve(standard_curves()[name])
    h = 1e-5
    ys = np.linspace(d.domain.lo, d.domain.hi, 41)[1:-1]
    fd = (dual_eval(d, ys + h)[0] - dual_eval(d, ys - h)[0]) / (2 * h)
    d1 = dual_eval(d, ys)[1]
    assert np.all(np.abs(fd - d1) <= 1e-6 * np.maximum(1, np.abs(d1)))
