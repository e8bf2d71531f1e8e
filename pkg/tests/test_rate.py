import math

import numpy as np
import pytest

from hypersbm.model import ModelParams
from hypersbm.oracle import exact_testing_probability
from hypersbm.rate import (
    minimax_exponent,
    predict_regimes,
    rate_report,
    renyi_half,
    wilson_interval,
)
from hypersbm.rate import testing_problem_mc as mc_testing
from hypersbm.rate import testing_weight as log_odds_weight
from hypersbm.relations import ConfusionCoefficients, confusion_coefficients


def test_renyi_basic_properties():
    for p in (0.01, 0.3, 0.5, 0.97):
        assert renyi_half(p, p) == 0.0
    rng = np.random.default_rng(0)
    for p, q in rng.uniform(1e-4, 1 - 1e-4, (200, 2)):
        assert renyi_half(p, q) == pytest.approx(renyi_half(q, p), abs=1e-12)
        assert renyi_half(p, q) > 0
    with pytest.raises(ValueError):
        renyi_half(0.0, 0.5)


def test_renyi_monotone_away_from_q():
    q = 0.1
    above = [renyi_half(p, q) for p in np.linspace(0.11, 0.99, 40)]
    below = [renyi_half(p, q) for p in np.linspace(0.09, 0.001, 40)]
    assert np.all(np.diff(above) > 0) and np.all(np.diff(below) > 0)


@pytest.mark.parametrize("a1,a2", [(30.0, 10.0), (30.0, 25.0), (12.0, 3.0)])
def test_small_probability_limit(a1, a2):
    n = 100
    value = renyi_half(a1 / n**2, a2 / n**2)
    # leading term (sqrt(a1) - sqrt(a2))^2 / n^2
    assert value == pytest.approx((math.sqrt(a1) - math.sqrt(a2)) ** 2 / n**2, rel=0.01)
    # same order as (a1 - a2)^2 / (n^2 a1), within the factor (sqrt(a1)+sqrt(a2))^2 / a1 in [1, 4]
    ratio = value / ((a1 - a2) ** 2 / (n**2 * a1))
    assert 0.25 <= ratio <= 1.0


def test_d2_exponent_without_signal():
    report = rate_report(ModelParams(10, 2, 2, 0.5, (0.5, 0.5)))
    assert report.exponent == 0 and report.predicted_risk == 1


def test_d2_exponent_is_single_product():
    n, a, b = 200, 20.0, 5.0
    params = ModelParams(n, 2, 2, 0.5, (a / n, b / n))
    coeffs = confusion_coefficients(2, 2, n)
    report = minimax_exponent(params, coeffs)
    assert report.pairs == ((1, 2),)
    assert report.exponent == coeffs.m[(1, 2)] * renyi_half(a / n, b / n)
    approx = (n / 2) * (math.sqrt(a) - math.sqrt(b)) ** 2 / n
    assert abs(report.exponent / approx - 1) < 0.25


def test_d3_k2_has_one_summand():
    report = rate_report(ModelParams(30, 2, 3, 0.5, (0.3, 0.1)))
    assert report.pairs == ((1, 2),)
    assert report.exponent == pytest.approx(report.m[(1, 2)] * report.divergence[(1, 2)])


def test_exponent_depends_on_n_only_through_coefficients():
    coeffs = confusion_coefficients(3, 3, 30)
    a = minimax_exponent(ModelParams(30, 3, 3, 0.5, (0.3, 0.2, 0.1)), coeffs)
    b = minimax_exponent(ModelParams(300, 3, 3, 0.5, (0.3, 0.2, 0.1)), coeffs)
    assert a.exponent == b.exponent
    assert 0 < a.predicted_risk <= 1


def test_condition_diagnostics():
    params = ModelParams(40, 3, 3, 0.5, (0.3, 0.2, 0.1))
    report = rate_report(params)
    assert report.condition_main == pytest.approx(report.exponent / (27 * math.log(3)))
    assert report.condition_order == pytest.approx(report.exponent / (27 * 2.0))


@pytest.mark.parametrize("ratio,expected", [(2.0, True), (0.5, False), (1.0, False)])
def test_predict_regimes(ratio, expected):
    n = 100
    assert predict_regimes(ratio * math.log(n), n)["exact_recovery"] is expected


def test_testing_weight_sign():
    assert log_odds_weight(0.3, 0.1) > 0
    assert log_odds_weight(0.2, 0.2) == 0


def test_testing_problem_trivial_cases():
    params = ModelParams(20, 2, 2, 0.5, (0.2, 0.2))
    coeffs = confusion_coefficients(2, 2, 20)
    assert mc_testing(params, coeffs, trials=1000).probability == 1.0
    assert exact_testing_probability(params, coeffs) == pytest.approx(1.0)
    zero = ConfusionCoefficients(2, 2, 20, {(1, 2): 0})
    params = ModelParams(20, 2, 2, 0.5, (0.4, 0.1))
    assert mc_testing(params, zero, trials=1000).probability == 1.0
    assert exact_testing_probability(params, zero) == 1.0


def test_single_pair_single_unit():
    params = ModelParams(20, 2, 2, 0.5, (0.4, 0.1))
    one = ConfusionCoefficients(2, 2, 20, {(1, 2): 1})
    assert exact_testing_probability(params, one) == pytest.approx(1 - 0.4 * 0.9, abs=1e-15)


def test_mc_against_exact_dp():
    params = ModelParams(60, 2, 2, 0.5, (0.3, 0.05))
    coeffs = ConfusionCoefficients(2, 2, 60, {(1, 2): 30})
    exact = exact_testing_probability(params, coeffs)
    est = mc_testing(params, coeffs, trials=10**6, seed=3)
    assert abs(est.probability - exact) <= 3 * est.width
    assert exact <= math.exp(-minimax_exponent(params, coeffs).exponent)


def test_mc_is_reproducible():
    params = ModelParams(30, 3, 3, 0.5, (0.3, 0.2, 0.1))
    coeffs = confusion_coefficients(3, 3, 30)
    a = mc_testing(params, coeffs, trials=200000, seed=1)
    b = mc_testing(params, coeffs, trials=200000, seed=1)
    assert a == b


def test_multi_pair_dp_against_mc():
    params = ModelParams(12, 3, 3, 0.5, (0.5, 0.3, 0.15))
    coeffs = ConfusionCoefficients(3, 3, 12, {(1, 2): 6, (2, 3): 9})
    exact = exact_testing_probability(params, coeffs)
    est = mc_testing(params, coeffs, trials=400000, seed=2)
    assert abs(est.probability - exact) <= 3 * est.width
    assert exact <= math.exp(-minimax_exponent(params, coeffs).exponent)


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - lo == pytest.approx(0.192, abs=0.002)
    assert wilson_interval(0, 10)[0] == 0
