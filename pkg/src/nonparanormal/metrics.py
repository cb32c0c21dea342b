"""Structure-recovery and risk metrics."""

import math
from dataclasses import dataclass

import numpy as np

from .estimator import CovarianceEstimate
from .glasso import DEFAULT_ZERO_TOL, PrecisionEstimate, edge_set
from .graphs import GraphSpec

LOG_2PI = math.log(2.0 * math.pi)
IRREP_MAX_P = 60


class DegenerateTruthError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    fp: int
    fn: int
    lam: float = float("nan")

    @property
    def score(self):
        return self.fp + self.fn


@dataclass(frozen=True)
class OracleResult:
    lambda_star: float
    score: int
    per_level: tuple

    @property
    def fp(self):
        return self._best().fp

    @property
    def fn(self):
        return self._best().fn

    def _best(self):
        return next(c for c in self.per_level if c.lam == self.lambda_star)


@dataclass(frozen=True)
class IrrepDiagnostics:
    alpha_slack: float
    k_sigma: float
    k_gamma: float
    max_degree_d: int
    min_signal: float


def _same_p(a, b):
    if a.p != b.p:
        raise ValueError(f"graphs have different vertex counts ({a.p} vs {b.p})")


def fp_fn(truth, estimate, lam=float("nan")):
    """False positives (estimated, not true) and false negatives (true, not estimated)."""
    _same_p(truth, estimate)
    return ConfusionCounts(fp=len(estimate.edges - truth.edges),
                           fn=len(truth.edges - estimate.edges), lam=float(lam))


def symmetric_difference(a, b):
    """Edges only in ``a`` and edges only in ``b``."""
    _same_p(a, b)
    return GraphSpec(a.p, a.edges - b.edges), GraphSpec(a.p, b.edges - a.edges)


def path_counts(path, truth, zero_tol=DEFAULT_ZERO_TOL):
    return [fp_fn(truth, edge_set(est, zero_tol), lam)
            for lam, est in zip(path.lambdas, path.estimates)]


def oracle_scan(path, truth, zero_tol=DEFAULT_ZERO_TOL):
    """Penalty level minimizing ``FP + FN`` along ``path``.

    Ties go to the largest penalty, i.e. the sparsest model.
    """
    counts = path_counts(path, truth, zero_tol)
    if not counts:
        raise ValueError("empty regularization path")
    best = min(counts, key=lambda c: (c.score, -c.lam))
    return OracleResult(lambda_star=best.lam, score=best.score, per_level=tuple(counts))


def roc_point(counts, truth):
    r = len(truth)
    negatives = truth.max_edges - r
    if r == 0 or negatives == 0:
        raise DegenerateTruthError("ROC needs a true graph that is neither empty nor complete")
    return 1.0 - counts.fn / r, 1.0 - counts.fp / negatives


def roc_points(path, truth, zero_tol=DEFAULT_ZERO_TOL):
    """``(1 - FN/r, 1 - FP/(C(p,2) - r))`` for each level of ``path``."""
    r = len(truth)
    if r == 0 or r == truth.max_edges:
        raise DegenerateTruthError("ROC needs a true graph that is neither empty nor complete")
    return [roc_point(c, truth) for c in path_counts(path, truth, zero_tol)]


def _matrix(x):
    if isinstance(x, CovarianceEstimate):
        return x.matrix
    if isinstance(x, PrecisionEstimate):
        return x.omega
    return np.asarray(x, dtype=np.float64)


def _logdet_pd(m, what):
    sign, logdet = np.linalg.slogdet(m)
    if sign <= 0 or np.linalg.eigvalsh(0.5 * (m + m.T)).min() <= 0:
        raise ValueError(f"{what} must be positive definite")
    return logdet


def sample_risk(s_f, omega):
    """``(tr(omega S_n(f)) - log|omega| - p log 2pi) / 2``, signs as printed.

    ``s_f`` is either the transformed data (an ``n x p`` array or
    ``DataMatrix``) or a ready-made ``CovarianceEstimate``.
    """
    omega = _matrix(omega)
    if isinstance(s_f, CovarianceEstimate):
        s = s_f.matrix
    else:
        values = np.asarray(getattr(s_f, "values", s_f), dtype=np.float64)
        centred = values - values.mean(axis=0)
        s = centred.T @ centred / values.shape[0]
    if s.shape != omega.shape:
        raise ValueError("covariance and omega shapes differ")
    p = omega.shape[0]
    return 0.5 * (float(np.sum(omega * s)) - _logdet_pd(omega, "omega") - p * LOG_2PI)


def population_risk(sigma, sigma0):
    """``(tr(sigma^-1 sigma0) + log|sigma| - p log 2pi) / 2``, signs as printed."""
    sigma = _matrix(sigma)
    sigma0 = _matrix(sigma0)
    if sigma.shape != sigma0.shape:
        raise ValueError("shape mismatch")
    _logdet_pd(sigma0, "sigma0")
    logdet = _logdet_pd(sigma, "sigma")
    p = sigma.shape[0]
    return 0.5 * (float(np.trace(np.linalg.solve(sigma, sigma0))) + logdet - p * LOG_2PI)


def max_cov_deviation(s_tilde, s_oracle):
    """Entrywise maximum absolute difference."""
    a, b = _matrix(s_tilde), _matrix(s_oracle)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a - b)))


def irrepresentability(omega0, zero_tol=0.0):
    """Incoherence diagnostics for a true precision matrix.

    The support includes the diagonal. ``Gamma = Sigma0 (x) Sigma0`` is
    indexed so that pair ``(i, j)`` maps to row ``i * p + j``.
    """
    omega0 = _matrix(omega0)
    p = omega0.shape[0]
    if p > IRREP_MAX_P:
        raise ValueError(f"irrepresentability limited to p <= {IRREP_MAX_P}, got {p}")
    sigma0 = np.linalg.inv(omega0)
    support = (np.abs(omega0) > zero_tol).ravel()
    gamma = np.kron(sigma0, sigma0)
    g_ss = gamma[np.ix_(support, support)]
    g_ss_inv = np.linalg.inv(g_ss)
    if support.all():
        incoherence = 0.0
    else:
        g_cs = gamma[np.ix_(~support, support)]
        incoherence = np.abs(g_cs @ g_ss_inv).sum(axis=1).max()
    strengths = np.abs(omega0[np.abs(omega0) > zero_tol])
    return IrrepDiagnostics(
        alpha_slack=float(1.0 - incoherence),
        k_sigma=float(np.abs(sigma0).sum(axis=1).max()),
        k_gamma=float(np.abs(g_ss_inv).sum(axis=1).max()),
        max_degree_d=int((np.abs(omega0) > zero_tol).sum(axis=1).max()),
        min_signal=float(strengths.min()),
    )
