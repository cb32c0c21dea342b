import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonparanormal.gaussian import (
    DEFAULT_RULE,
    gauss_hermite_rule,
    gaussian_weighted_integral,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
)
from oracles import mp_cdf, mp_quantile


def test_pdf_values():
    assert std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-16)
    # reference from 50-digit evaluation of the closed form
    assert std_normal_pdf(1.0) == pytest.approx(0.24197072451914337, abs=1e-16)
    assert std_normal_pdf(-1.0) == std_normal_pdf(1.0)


def test_pdf_rejects_nonfinite():
    with pytest.raises(ValueError):
        std_normal_pdf(float("nan"))


def test_cdf_values():
    assert std_normal_cdf(0.0) == 0.5
    tail = 1.0 - std_normal_cdf(1.0)
    assert 0.12099 <= tail <= 0.24198
    assert std_normal_cdf(1.959964) == pytest.approx(mp_cdf("1.959964"), abs=1e-15)
    assert std_normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-9)


@given(st.floats(min_value=-30, max_value=30))
def test_cdf_symmetry(t):
    assert abs(std_normal_cdf(-t) - (1.0 - std_normal_cdf(t))) <= 1e-14


def test_cdf_monotone():
    t = np.linspace(-10, 10, 20001)
    assert np.all(np.diff(std_normal_cdf(t)) >= 0)


def test_quantile_values():
    assert std_normal_quantile(0.5) == 0.0
    assert std_normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
    assert std_normal_quantile(0.975) == pytest.approx(mp_quantile("0.975"), abs=1e-14)
    hi = math.sqrt(2 * math.log(200))
    assert hi - 1.5 <= std_normal_quantile(0.995) <= hi


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_quantile_domain(u):
    with pytest.raises(ValueError):
        std_normal_quantile(u)


def test_quantile_against_high_precision():
    u = np.concatenate([np.logspace(-8, -1, 60), np.linspace(0.05, 0.95, 41),
                        1 - np.logspace(-8, -1, 60)])
    got = std_normal_quantile(u)
    ref = np.array([mp_quantile(float(v)) for v in u])
    assert np.max(np.abs(got - ref)) <= 1e-12


@given(st.floats(min_value=1e-8, max_value=1 - 1e-8))
def test_quantile_round_trip_and_oddness(u):
    x = std_normal_quantile(u)
    assert abs(std_normal_cdf(x) - u) <= 1e-12
    assert std_normal_quantile(1.0 - u) == pytest.approx(-x, abs=1e-9)


def test_quantile_is_exactly_odd_on_exact_reflections():
    u = np.linspace(0.001, 0.499, 499)
    np.testing.assert_array_equal(std_normal_quantile(1.0 - u), -std_normal_quantile(1.0 - (1.0 - u)))


def test_cdf_quantile_inverse_on_t_grid():
    t = np.linspace(-5, 5, 1001)
    assert np.max(np.abs(std_normal_quantile(std_normal_cdf(t)) - t)) <= 1e-8


def test_tail_inequality():
    t = np.arange(1.0, 8.0001, 0.5)
    # upper tail evaluated by reflection so it keeps relative precision
    phi, tail = std_normal_pdf(t), std_normal_cdf(-t)
    assert np.all(phi / (2 * t) <= tail)
    assert np.all(tail <= phi / t)


@pytest.mark.parametrize("eta", [0.99, 0.995, 0.999, 0.9999, 1 - 1e-8])
def test_quantile_log_bound(eta):
    hi = math.sqrt(2 * math.log(1 / (1 - eta)))
    assert 0.0 <= hi - std_normal_quantile(eta) <= 1.5


def test_rule_properties():
    rule = gauss_hermite_rule(64)
    assert rule.order == 64
    assert abs(rule.weights.sum() - 1.0) <= 1e-12
    assert np.all(rule.weights > 0)
    assert np.all(np.diff(rule.nodes) > 0)


def test_weighted_integral_examples():
    assert gaussian_weighted_integral(lambda t: np.ones_like(t), 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert gaussian_weighted_integral(lambda t: t, 0.3, 1.0) == pytest.approx(0.3, abs=1e-14)
    assert gaussian_weighted_integral(lambda t: t ** 2, 0.0, 2.0) == pytest.approx(4.0, abs=1e-10)


def test_weighted_integral_exact_for_polynomials():
    # E[T^k] for T ~ N(mu, s^2) via the moment recursion
    mu, s = 0.7, 1.3
    moments = [1.0, mu]
    for k in range(2, 12):
        moments.append(mu * moments[k - 1] + (k - 1) * s ** 2 * moments[k - 2])
    for k, m in enumerate(moments):
        got = gaussian_weighted_integral(lambda t, k=k: t ** k, mu, s)
        assert got == pytest.approx(m, rel=1e-11)


@given(st.floats(-3, 3), st.floats(0.1, 3))
def test_odd_integrand_vanishes(mu, sigma):
    got = gaussian_weighted_integral(lambda t: np.sin(t - mu) + (t - mu) ** 3, mu, sigma, DEFAULT_RULE)
    assert abs(got) <= 1e-12


def test_weighted_integral_rejects_nonfinite():
    with pytest.raises(ValueError):
        gaussian_weighted_integral(lambda t: np.full_like(t, np.inf), 0.0, 1.0)
