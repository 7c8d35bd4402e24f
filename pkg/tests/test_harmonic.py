import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nearcurve.constants import SANDWICH_LOWER, SANDWICH_UPPER, ZETA3, zeta3
from nearcurve.curves import Interval, dual_curve, make_curve, standard_curves
from nearcurve.harmonic import (
    ResourceError,
    SequenceSample,
    StationaryPointError,
    curve_sequence,
    discrepancy,
    e,
    erdos_turan_bound,
    exp_sum,
    fresnel_average,
    fresnel_truncation,
    dual_fraction_sum,
    integrate_phase,
    oscillatory_integral,
    poisson_expansion,
    star_discrepancy,
    stationary_phase,
    weyl_sums,
)

UNIT_PARABOLA = make_curve("parabola", [1, 0, 0], Interval(0, 1))
PARABOLA = make_curve("parabola", [1, 0, 0], Interval(1, 2))
HALF = make_curve("parabola", [0.5, 0, 0], Interval(-1, 1))


def _sample(values):
    return SequenceSample.from_values(np.asarray(values, dtype=float))


def test_e_is_unit_circle():
    assert e(0.25) == pytest.approx(1j)


def test_exp_sum_examples():
    assert exp_sum(UNIT_PARABOLA, 1, 2) == pytest.approx(1 + 0j, abs=1e-12)
    ex = make_curve("exponential", [], Interval(0, 1))
    assert exp_sum(ex, 3, 1) == pytest.approx(e(3) + e(3 * math.e), abs=1e-12)


@pytest.mark.parametrize("name", ["parabola", "cubic", "exponential", "circle-arc"])
def test_exp_sum_brute_force(name):
    c = standard_curves()[name]
    lo, hi = c.interval.frac_lo, c.interval.frac_hi
    k, q = 3, 17
    ref = sum(cmath.exp(2j * math.pi * k * q * c.f_mp(a / q)) for a in
              range(math.ceil(q * lo), math.floor(q * hi) + 1))
    assert exp_sum(c, k, q) == pytest.approx(complex(ref), abs=1e-9)


@pytest.mark.parametrize("name", ["parabola", "logarithm", "fermat"])
def test_exp_sum_conjugation(name):
    c = standard_curves()[name]
    for k, q in [(1, 7), (4, 31)]:
        assert exp_sum(c.negated(), k, q) == pytest.approx(exp_sum(c, k, q).conjugate(), abs=1e-12)


def test_zero_phase_gives_length():
    assert integrate_phase(lambda x: 0 * x, -1.0, 2.5, 0.0) == pytest.approx(3.5 + 0j, abs=1e-13)


def test_oscillatory_integral_vs_mpmath():
    ref = mpmath.quad(lambda x: mpmath.expj(2 * mpmath.pi * 7 * (2 * x * x - 3 * x)), [1, 1.5, 2])
    assert oscillatory_integral(PARABOLA, 2, 3, 7) == pytest.approx(complex(ref), abs=1e-12)


def test_non_stationary_bound():
    k, j, q = 1, 10, 50
    bound = 1 / (math.pi * q * (j - 2 * k * 2))
    assert abs(oscillatory_integral(PARABOLA, k, j, q)) <= bound


def test_resource_cap():
    with pytest.raises(ResourceError):
        oscillatory_integral(PARABOLA, 1, 0, 10**9)


def test_stationary_phase_examples():
    sp = stationary_phase(HALF, 1, 0, 400)
    assert sp.value == pytest.approx(e(1 / 8) / 20, abs=1e-14)
    assert (sp.x0, sp.kappa) == (0.0, 1.0)
    assert sp.error_budget == pytest.approx((1 + math.log(400)) / 400)
    assert abs(oscillatory_integral(HALF, 1, 0, 400) - sp.value) < 0.02
    sp = stationary_phase(PARABOLA, 2, 6, 100)
    assert sp.x0 == pytest.approx(1.5)
    assert abs(sp.value) == pytest.approx(1 / 20, rel=1e-14)


def test_stationary_phase_rejects_boundary():
    with pytest.raises(StationaryPointError):
        stationary_phase(PARABOLA, 1, 4, 10)


@settings(max_examples=30, deadline=None)
@given(name=st.sampled_from(["parabola", "cubic", "exponential", "fermat", "circle-arc"]),
       k=st.integers(1, 5), q=st.integers(1, 10**5), t=st.floats(0.1, 0.9))
def test_magnitude_law(name, k, q, t):
    c = standard_curves()[name]
    jlo, jhi = c.dprime_range()
    j = math.floor(k * (jlo + t * (jhi - jlo)))
    if not jlo < j / k < jhi:
        return
    sp = stationary_phase(c, k, j, q)
    assert abs(sp.value) == pytest.approx(1 / math.sqrt(q * k * abs(c.d2(sp.x0))), rel=1e-12)


def test_stationary_phase_mod1_transcendental():
    # the reduced phase must survive a large lambda; compare with 60-digit evaluation
    c = standard_curves()["exponential"]
    k, j, q = 1, 2, 99991
    sp = stationary_phase(c, k, j, q)
    with mpmath.workdps(60):
        x0 = mpmath.log(2)
        ref = q * (mpmath.e ** x0 - 2 * x0)
        ref = float(ref - mpmath.floor(ref))
    assert sp.phase == pytest.approx(ref, abs=1e-12)


def test_poisson_examples():
    scale = math.log(2 + 2)
    assert abs(poisson_expansion(UNIT_PARABOLA, 1, 2) - exp_sum(UNIT_PARABOLA, 1, 2)) <= scale
    assert abs(poisson_expansion(PARABOLA, 1, 1) - exp_sum(PARABOLA, 1, 1)) <= scale
    s = exp_sum(PARABOLA, 5, 100)
    assert abs(s) <= 101
    assert abs(s - poisson_expansion(PARABOLA, 5, 100)) <= 5 * math.log(2 + 5 * 2)


def test_poisson_concave_is_conjugate():
    c = standard_curves()["logarithm"]
    d, p = exp_sum(c, 3, 13), poisson_expansion(c, 3, 13)
    assert abs(d - p) <= math.log(2 + 3 * 0.5)


def test_curve_sequence_examples():
    s = curve_sequence(UNIT_PARABOLA, 2)
    assert s.N == 5 and s.values.tolist() == [0, 0, 0, 0.5, 0]
    assert curve_sequence(standard_curves()["exponential"], 1).N == 2
    assert curve_sequence(PARABOLA, 100).N == 5150


def test_discrepancy_examples():
    s = _sample([0.5, 0.0, 0.5, 0.0])
    assert discrepancy(s, -0.25, 0.25) == 0
    s = _sample(np.linspace(0.1, 0.2, 7))
    assert discrepancy(s, 0.0, 0.99) == pytest.approx(7 - 0.99 * 7)


def test_discrepancy_edge_exact():
    # 0.3 - 0.1 is not 0.2 in binary; the exact recount keeps 0.2 outside (0.1, 0.2)
    s = _sample([0.2, 0.15, 0.1])
    assert discrepancy(s, 0.1, 0.2) == pytest.approx(1 - 0.1 * 3)


def test_star_discrepancy_examples():
    assert star_discrepancy(_sample([0.1, 0.5, 0.9])) == pytest.approx(0.7)
    assert star_discrepancy(_sample([0.5])) == 0.5
    N = 37
    assert star_discrepancy(_sample((np.arange(1, N + 1) - 0.5) / N)) == pytest.approx(0.5)


def test_weyl_sums_direct():
    s = _sample(np.random.default_rng(0).random(50))
    k = np.arange(1, 6)
    ref = np.exp(2j * np.pi * k[:, None] * s.values[None, :]).sum(axis=1)
    assert np.allclose(weyl_sums(s, 5), ref, atol=1e-12)


def test_erdos_turan_formula_K1():
    s = _sample(np.random.default_rng(1).random(200))
    a, b = 0.1, 0.35
    S1 = abs(np.exp(2j * np.pi * s.values).sum())
    expected = 200 / 2 + 2 * (0.5 + min(b - a, 1 / math.pi)) * S1
    assert erdos_turan_bound(s, 1, a, b) == pytest.approx(expected, rel=1e-12)


def test_erdos_turan_domination_examples():
    n = np.arange(1, 10_001)
    s = _sample(n * math.sqrt(2))
    assert abs(discrepancy(s, 0, 0.5)) <= erdos_turan_bound(s, 100, 0, 0.5)
    z = _sample(np.zeros(500))
    assert abs(discrepancy(z, -0.1, 0.1)) == pytest.approx(0.8 * 500)
    assert erdos_turan_bound(z, 10, -0.1, 0.1) >= 0.8 * 500


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), K=st.sampled_from([1, 10, 100]),
       alpha=st.floats(-0.5, 0.5), width=st.floats(1e-3, 0.999))
def test_erdos_turan_domination(seed, K, alpha, width):
    s = _sample(np.random.default_rng(seed).random(300) ** 2)
    assert abs(discrepancy(s, alpha, alpha + width)) <= erdos_turan_bound(s, K, alpha, alpha + width)


def test_dual_fraction_sum_examples():
    d = dual_curve(PARABOLA)
    assert dual_fraction_sum(d, 0, 1, 10, mode="near") == pytest.approx(2)
    assert dual_fraction_sum(d, 0, 1, 10, mode="half") == pytest.approx(2)
    assert dual_fraction_sum(d, 0, 1, 10, mode="one") == pytest.approx(4)
    assert dual_fraction_sum(d, 3, 3, 10) == 0


def test_fresnel():
    assert abs(fresnel_average() - (0.25 + 0.25j)) < 1e-3
    ref = mpmath.quad(lambda z: mpmath.expj(2 * mpmath.pi * z * z), mpmath.linspace(0, 3, 31))
    assert fresnel_truncation(3.0) == pytest.approx(complex(ref), abs=1e-12)


def test_zeta3():
    value, tail = zeta3()
    assert abs(value - float(mpmath.zeta(3))) < 1e-15 and tail <= 1e-15
    assert ZETA3 == value
    assert SANDWICH_LOWER == pytest.approx(SANDWICH_UPPER * 2 * math.sqrt(3) / 9, rel=1e-15)
