"""Winsorized marginal transforms and the transformed covariance that feeds
the graphical lasso."""

import math
from dataclasses import dataclass, field

import numpy as np

from .gaussian import std_normal_quantile


class DegenerateColumnError(ValueError):
    """A column has zero spread, so its marginal transform is undefined."""

    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column!r} is constant; remove it before fitting")


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x p`` matrix of observations with optional column names."""

    values: np.ndarray
    names: tuple = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("data must be a 2-d array")
        n, p = values.shape
        if n < 2 or p < 1:
            raise ValueError(f"need n >= 2 and p >= 1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("data contains non-finite entries")
        values.setflags(write=False)
        names = self.names
        if names is None:
            names = tuple(f"X{j + 1}" for j in range(p))
        names = tuple(str(name) for name in names)
        if len(names) != p:
            raise ValueError(f"{len(names)} names given for {p} columns")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", names)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def column(self, key):
        """Column by integer index or name."""
        if isinstance(key, str):
            if key not in self.names:
                raise KeyError(f"unknown column {key!r}")
            key = self.names.index(key)
        return self.values[:, key]


@dataclass(frozen=True)
class CovarianceEstimate:
    """Symmetric ``p x p`` matrix tagged as a covariance or a correlation."""

    matrix: np.ndarray
    kind: str
    n: int

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("covariance must be a square matrix")
        if self.kind not in ("covariance", "correlation"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12):
            raise ValueError("covariance matrix is not symmetric")
        if np.any(np.diag(matrix) <= 0):
            raise ValueError("covariance diagonal must be strictly positive")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def p(self):
        return self.matrix.shape[0]


def _as_column(column):
    column = np.asarray(column, dtype=np.float64)
    if column.ndim != 1 or column.size == 0:
        raise ValueError("column must be a nonempty 1-d array")
    if not np.all(np.isfinite(column)):
        raise ValueError("column contains non-finite entries")
    return column


def _ecdf_sorted(sorted_column, t):
    count = np.searchsorted(sorted_column, t, side="right")
    return count / sorted_column.size


def empirical_cdf(column, t):
    """Fraction of ``column`` entries that are ``<= t``.

    ``t`` may be a scalar or an array; ties are counted by the weak
    inequality, so the function is right-continuous.
    """
    column = np.sort(_as_column(column))
    out = _ecdf_sorted(column, np.asarray(t, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def truncation_level(n):
    """Winsorization level ``1 / (4 n^(1/4) sqrt(pi log n))``."""
    if n < 2:
        raise ValueError(f"truncation level needs n >= 2, got {n}")
    return 1.0 / (4.0 * n ** 0.25 * math.sqrt(math.pi * math.log(n)))


def winsorized_cdf(column, t, delta=None):
    """Empirical cdf clamped into ``[delta, 1 - delta]``.

    ``delta`` defaults to ``truncation_level(len(column))``.
    """
    column = _as_column(column)
    if delta is None:
        delta = truncation_level(column.size)
    out = np.clip(empirical_cdf(column, t), delta, 1.0 - delta)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MarginalTransform:
    """Estimated transform ``x -> mu_hat + sigma_hat * Phi^-1(F~(x))`` of one column."""

    sorted_sample: np.ndarray
    delta: float
    mu_hat: float
    sigma_hat: float

    @property
    def n(self):
        return self.sorted_sample.size

    def cdf(self, t):
        """Winsorized empirical cdf at ``t``."""
        out = np.clip(_ecdf_sorted(self.sorted_sample, np.asarray(t, dtype=np.float64)),
                      self.delta, 1.0 - self.delta)
        return float(out) if np.ndim(out) == 0 else out

    def normal_scores(self, t):
        """``Phi^-1`` of the Winsorized cdf; the centred, unit-scale transform."""
        return std_normal_quantile(self.cdf(t))

    def __call__(self, t):
        return self.mu_hat + self.sigma_hat * self.normal_scores(t)

    @property
    def bounds(self):
        """Range of values the transform can produce."""
        z = std_normal_quantile(1.0 - self.delta)
        return self.mu_hat - self.sigma_hat * z, self.mu_hat + self.sigma_hat * z


def fit_marginal_transform(column, delta=None, name=None):
    """Fit the Winsorized normal-score transform of a single column.

    Mean and standard deviation use the ``1/n`` convention.

    Raises
    ------
    DegenerateColumnError
        If the column is constant.
    """
    column = _as_column(column)
    n = column.size
    if delta is None:
        delta = truncation_level(n)
    if not 0.0 < delta < 0.5:
        raise ValueError(f"truncation level must lie in (0, 1/2), got {delta}")
    if np.ptp(column) == 0:
        raise DegenerateColumnError(name if name is not None else "?")
    mu_hat = float(column.mean())
    sigma_hat = float(np.sqrt(np.mean((column - mu_hat) ** 2)))
    sorted_sample = np.sort(column)
    sorted_sample.setflags(write=False)
    return MarginalTransform(sorted_sample=sorted_sample, delta=float(delta),
                             mu_hat=mu_hat, sigma_hat=sigma_hat)


def fit_transforms(data, delta=None):
    """One ``MarginalTransform`` per column of ``data``."""
    return [fit_marginal_transform(data.values[:, j], delta=delta, name=data.names[j])
            for j in range(data.p)]


def _scores_of_sample(column, delta):
    # normal scores at the sample points themselves: one sort per column
    order = np.sort(column)
    return std_normal_quantile(np.clip(_ecdf_sorted(order, column), delta, 1.0 - delta))


def normal_scores(data, delta=None):
    """``n x p`` matrix of Winsorized normal scores ``Phi^-1(F~_j(X_ij))``."""
    if delta is None:
        delta = truncation_level(data.n)
    scores = np.empty_like(data.values)
    for j in range(data.p):
        column = data.values[:, j]
        if np.ptp(column) == 0:
            raise DegenerateColumnError(data.names[j])
        scores[:, j] = _scores_of_sample(column, delta)
    return scores


def _covariance(values):
    centred = values - values.mean(axis=0)
    cov = centred.T @ centred / values.shape[0]
    return 0.5 * (cov + cov.T)


def transformed_values(data, delta=None):
    """``n x p`` matrix ``f~(X)``: normal scores rescaled by each column's mean and sd."""
    scores = normal_scores(data, delta)
    mu = data.values.mean(axis=0)
    sigma = np.sqrt(np.mean((data.values - mu) ** 2, axis=0))
    return mu + sigma * scores


def transformed_covariance(data, delta=None):
    """Sample covariance (``1/n``) of the Winsorized transformed data."""
    return CovarianceEstimate(_covariance(transformed_values(data, delta)),
                              kind="covariance", n=data.n)


def transformed_correlation(data, delta=None):
    """Correlation matrix of the Winsorized normal scores.

    Depends on the data only through column ranks, so any strictly
    increasing per-column map leaves it bitwise unchanged.
    """
    cov = _covariance(normal_scores(data, delta))
    scale = np.sqrt(np.diag(cov))
    corr = cov / np.outer(scale, scale)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return CovarianceEstimate(corr, kind="correlation", n=data.n)


def sample_covariance(data):
    """Plain ``1/n`` sample covariance of the raw data (the Gaussian route)."""
    for j in range(data.p):
        if np.ptp(data.values[:, j]) == 0:
            raise DegenerateColumnError(data.names[j])
    cov = _covariance(data.values)
    return CovarianceEstimate(cov, kind="covariance", n=data.n)
