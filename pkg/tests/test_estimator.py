import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from nonparanormal.estimator import (
    CovarianceEstimate,
    DataMatrix,
    DegenerateColumnError,
    empirical_cdf,
    fit_marginal_transform,
    normal_scores,
    sample_covariance,
    transformed_correlation,
    transformed_covariance,
    transformed_values,
    truncation_level,
    winsorized_cdf,
)
from nonparanormal.gaussian import std_normal_quantile
from nonparanormal.metrics import max_cov_deviation
from nonparanormal.synthetic import (
    GeneratorConfig,
    TransformSpec,
    make_rng,
    npn_sample,
    synthetic_problem,
)


def test_empirical_cdf_examples():
    assert empirical_cdf([1, 2, 3], 2) == pytest.approx(2 / 3)
    assert empirical_cdf([1, 2, 3], 0) == 0.0
    assert empirical_cdf([5, 5, 5, 5], 5) == 1.0


def test_empirical_cdf_right_continuous_steps():
    col = np.array([3.0, 1.0, 2.0, 2.0])
    t = np.array([0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 9.0])
    np.testing.assert_allclose(empirical_cdf(col, t), [0, .25, .25, .75, .75, 1, 1])


def test_empirical_cdf_brute_force():
    rng = np.random.default_rng(3)
    col = rng.integers(0, 6, size=40).astype(float)
    for t in np.linspace(-1, 7, 33):
        assert empirical_cdf(col, t) == sum(x <= t for x in col) / col.size


def test_empirical_cdf_empty():
    with pytest.raises(ValueError):
        empirical_cdf([], 0.0)


def test_truncation_level():
    # 50-digit evaluation of the closed form gives 0.014974328525...
    assert truncation_level(256) == pytest.approx(0.0149745, abs=1e-6)
    assert truncation_level(256) == pytest.approx(0.01497432852507900, rel=1e-14)
    assert truncation_level(2) > truncation_level(3)
    assert 0 < truncation_level(1000) < 0.5
    with pytest.raises(ValueError):
        truncation_level(1)


def test_truncation_level_decreasing_in_range():
    d = np.array([truncation_level(n) for n in range(2, 5000)])
    assert np.all(np.diff(d) < 0)
    assert np.all((d > 0) & (d < 0.5))


def test_winsorized_cdf_examples():
    col = np.arange(1, 101, dtype=float)
    delta = truncation_level(100)
    assert winsorized_cdf(col, 0) == delta
    assert winsorized_cdf(col, 50) == 0.5
    assert winsorized_cdf(col, 1000) == 1 - delta


@given(hnp.arrays(np.float64, st.integers(2, 60), elements=st.floats(-1e6, 1e6)),
       st.floats(-2e6, 2e6))
def test_winsorized_cdf_in_band(col, t):
    delta = truncation_level(col.size)
    value = winsorized_cdf(col, t)
    assert delta <= value <= 1 - delta


def test_marginal_transform_bounds_and_median():
    rng = np.random.default_rng(0)
    col = rng.uniform(size=500)
    tr = fit_marginal_transform(col)
    assert tr.mu_hat == pytest.approx(col.mean())
    assert tr.sigma_hat == pytest.approx(col.std(ddof=0))
    lo, hi = tr.bounds
    t = np.linspace(-1, 2, 1001)
    out = tr(t)
    assert np.all(out >= lo - 1e-12) and np.all(out <= hi + 1e-12)
    z = std_normal_quantile(1 - tr.delta)
    assert hi == pytest.approx(tr.mu_hat + tr.sigma_hat * z)
    # between the two middle order statistics the empirical cdf is exactly 1/2
    mid = np.median(col)
    assert tr(mid) == pytest.approx(tr.mu_hat, abs=1e-12)


@pytest.mark.parametrize("n", [2, 10, 100, 1000, 10000])
def test_normal_scores_bounded_by_sqrt_2_log_n(n):
    rng = np.random.default_rng(n)
    tr = fit_marginal_transform(rng.normal(size=n))
    t = np.linspace(-10, 10, 2001)
    assert np.max(np.abs(tr.normal_scores(t))) <= math.sqrt(2 * math.log(n))


def test_degenerate_column_named():
    with pytest.raises(DegenerateColumnError, match="flat"):
        fit_marginal_transform([2.0, 2.0, 2.0], name="flat")
    data = DataMatrix(np.column_stack([np.arange(5.0), np.ones(5)]), names=("a", "b"))
    with pytest.raises(DegenerateColumnError, match="'b'"):
        transformed_covariance(data)


def test_data_matrix_validation():
    with pytest.raises(ValueError):
        DataMatrix(np.ones((1, 3)))
    with pytest.raises(ValueError):
        DataMatrix(np.array([[1.0, np.nan], [2.0, 3.0]]))
    with pytest.raises(ValueError):
        DataMatrix(np.ones((3, 2)), names=("a",))


def test_covariance_two_points():
    cov = transformed_covariance(DataMatrix([[1.0], [4.0]]))
    assert cov.matrix.shape == (1, 1) and cov.matrix[0, 0] > 0


def test_monotone_copy_gives_unit_correlation():
    rng = np.random.default_rng(1)
    x = rng.normal(size=300)
    data = DataMatrix(np.column_stack([x, np.exp(x) + x ** 3]))
    cov = transformed_covariance(data).matrix
    assert cov[0, 1] / math.sqrt(cov[0, 0] * cov[1, 1]) == pytest.approx(1.0, abs=1e-12)
    assert transformed_correlation(data).matrix[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_correlation_diagonal_and_exp_invariance():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(200, 4))
    a = transformed_correlation(DataMatrix(x))
    assert a.kind == "correlation"
    np.testing.assert_array_equal(np.diag(a.matrix), np.ones(4))
    y = x.copy()
    y[:, 2] = np.exp(y[:, 2])
    np.testing.assert_array_equal(a.matrix, transformed_correlation(DataMatrix(y)).matrix)


def test_independent_columns_small_correlation():
    # null sd of a rank-based correlation is about 1/sqrt(n); 4/sqrt(n) is a wide band
    rng = np.random.default_rng(5)
    n = 10000
    corr = transformed_correlation(DataMatrix(rng.normal(size=(n, 3)) ** 3)).matrix
    off = corr[~np.eye(3, dtype=bool)]
    assert np.all(np.abs(off) < 4 / math.sqrt(n))


def test_ties_share_scores():
    data = DataMatrix(np.array([[1.0], [2.0], [2.0], [3.0], [5.0]]))
    scores = normal_scores(data)[:, 0]
    assert scores[1] == scores[2]
    assert np.all(np.diff(scores[[0, 1, 3, 4]]) > 0)


def test_transformed_values_match_marginal_transforms():
    rng = np.random.default_rng(6)
    x = rng.gamma(2.0, size=(120, 3))
    data = DataMatrix(x)
    vals = transformed_values(data)
    for j in range(3):
        tr = fit_marginal_transform(x[:, j])
        np.testing.assert_allclose(vals[:, j], tr(x[:, j]), rtol=0, atol=1e-12)


def test_covariance_against_naive_formula():
    rng = np.random.default_rng(7)
    x = rng.exponential(size=(50, 3))
    data = DataMatrix(x)
    f = np.column_stack([fit_marginal_transform(x[:, j])(x[:, j]) for j in range(3)])
    mu = f.mean(axis=0)
    naive = sum(np.outer(r - mu, r - mu) for r in f) / 50
    np.testing.assert_allclose(transformed_covariance(data).matrix, naive, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_covariance_factorizes_through_correlation(seed):
    rng = np.random.default_rng(seed)
    data = DataMatrix(rng.normal(size=(40, 4)) * rng.uniform(0.5, 3, size=4))
    cov = transformed_covariance(data).matrix
    corr = transformed_correlation(data).matrix
    d = np.diag(np.sqrt(np.diag(cov)))
    np.testing.assert_allclose(d @ corr @ d, cov, rtol=0, atol=1e-10)
    assert np.min(np.linalg.eigvalsh(cov)) > -1e-12


def test_covariance_estimate_validation():
    with pytest.raises(ValueError):
        CovarianceEstimate(np.array([[1.0, 0.2], [0.3, 1.0]]), "covariance", 10)
    with pytest.raises(ValueError):
        CovarianceEstimate(np.array([[0.0, 0.0], [0.0, 1.0]]), "covariance", 10)
    with pytest.raises(ValueError):
        CovarianceEstimate(np.eye(2), "other", 10)


def test_sample_covariance_uses_one_over_n():
    x = np.array([[0.0, 1.0], [2.0, 5.0]])
    np.testing.assert_allclose(sample_covariance(DataMatrix(x)).matrix, [[1.0, 2.0], [2.0, 4.0]])


def test_deviation_from_oracle_covariance_decays_for_gaussian_data():
    medians = []
    for n in (100, 400, 1600, 6400):
        devs = []
        for rep in range(10):
            rng = make_rng(17, n, rep)
            problem = synthetic_problem(GeneratorConfig(), rng)
            sample = npn_sample(n, problem.mu0, problem.sigma0, TransformSpec(), rng,
                                return_latent=True)
            z = sample.latent - sample.latent.mean(axis=0)
            devs.append(max_cov_deviation(transformed_covariance(sample.data), z.T @ z / n))
        medians.append(np.median(devs))
    assert all(b <= a for a, b in zip(medians, medians[1:])), medians
