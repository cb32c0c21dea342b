"""Graphical lasso by block coordinate descent.

Minimizes ``tr(Omega S) - log det Omega + lam * sum_{j != k} |Omega_jk|``.
The diagonal is not penalized. Each outer sweep visits every column and
solves a lasso for it by cyclic coordinate descent; the covariance iterate
``W`` keeps ``W_jj = S_jj`` throughout.
"""

from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import linalg

from .estimator import CovarianceEstimate
from .graphs import GraphSpec

DEFAULT_TOL = 1e-6
DEFAULT_MAX_SWEEPS = 200
INNER_TOL = 1e-7
DEFAULT_ZERO_TOL = 1e-8


class SingularCovarianceError(linalg.LinAlgError):
    """The unpenalized problem was asked of a covariance that is not positive definite."""


@dataclass(frozen=True)
class PrecisionEstimate:
    omega: np.ndarray
    sigma: np.ndarray
    lam: float
    iterations: int
    max_kkt_violation: float
    converged: bool
    objective_trace: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class RegularizationPath:
    lambdas: np.ndarray
    estimates: tuple
    edge_counts: tuple

    def __len__(self):
        return len(self.estimates)


@njit(cache=True)
def _lasso_column(W, S, beta, j, lam, inner_tol, max_inner):
    # Coordinate descent for min 0.5 b'W11 b - b's12 + lam |b|_1 over the
    # coordinates k != j; ``grad`` tracks W11 @ b.
    p = W.shape[0]
    grad = np.zeros(p)
    for k in range(p):
        if k == j or beta[k] == 0.0:
            continue
        for m in range(p):
            if m != j:
                grad[m] += W[m, k] * beta[k]
    for _ in range(max_inner):
        max_step = 0.0
        for k in range(p):
            if k == j:
                continue
            wkk = W[k, k]
            old = beta[k]
            z = S[k, j] - (grad[k] - wkk * old)
            if z > lam:
                new = (z - lam) / wkk
            elif z < -lam:
                new = (z + lam) / wkk
            else:
                new = 0.0
            delta = new - old
            if delta != 0.0:
                beta[k] = new
                for m in range(p):
                    if m != j:
                        grad[m] += W[m, k] * delta
                step = abs(delta) * wkk
                if step > max_step:
                    max_step = step
        if max_step < inner_tol:
            break
    return grad


@njit(cache=True)
def _sweep(W, S, B, lam, inner_tol, max_inner):
    p = W.shape[0]
    change = 0.0
    for j in range(p):
        beta = B[:, j]
        grad = _lasso_column(W, S, beta, j, lam, inner_tol, max_inner)
        for k in range(p):
            if k == j:
                continue
            change += abs(grad[k] - W[k, j])
            W[k, j] = grad[k]
            W[j, k] = grad[k]
    if p > 1:
        change /= p * (p - 1)
    return change


def _omega_from_blocks(W, B):
    p = W.shape[0]
    omega = np.zeros_like(W)
    for j in range(p):
        mask = np.arange(p) != j
        beta = B[mask, j]
        omega_jj = 1.0 / (W[j, j] - W[mask, j] @ beta)
        omega[j, j] = omega_jj
        omega[mask, j] = -beta * omega_jj
    return 0.5 * (omega + omega.T)


def objective(omega, S, lam):
    """Penalized negative log-likelihood; ``inf`` when ``omega`` is not PD."""
    try:
        chol = linalg.cholesky(0.5 * (omega + omega.T), lower=True)
    except linalg.LinAlgError:
        return np.inf
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    off = np.abs(omega).sum() - np.abs(np.diag(omega)).sum()
    return float(np.sum(omega * S) - logdet + lam * off)


def kkt_violation(omega, S, lam, sigma=None):
    """Largest violation of the stationarity conditions at ``omega``.

    ``sigma`` defaults to the exact inverse of ``omega``. Off-diagonal zeros
    must satisfy ``|S - W| <= lam``; nonzeros ``S - W + lam * sign = 0``;
    the diagonal ``W = S``.
    """
    S = np.asarray(S)
    if sigma is None:
        sigma = linalg.inv(omega)
    resid = S - sigma
    off = ~np.eye(S.shape[0], dtype=bool)
    zero = (omega == 0.0) & off
    nonzero = (omega != 0.0) & off
    viol = [np.abs(np.diag(resid)).max(initial=0.0)]
    viol.append(np.max(np.abs(resid[zero]) - lam, initial=0.0))
    viol.append(np.max(np.abs(resid[nonzero] + lam * np.sign(omega[nonzero])), initial=0.0))
    return float(max(viol))


def _as_matrix(S):
    if isinstance(S, CovarianceEstimate):
        return S.matrix
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("S must be a square matrix")
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-12):
        raise ValueError("S must be symmetric")
    return S


def mle_inverse(S):
    """Unpenalized estimate ``S^-1`` via a Cholesky factorization.

    Raises
    ------
    SingularCovarianceError
        If ``S`` is not positive definite, e.g. whenever ``p > n``.
    """
    S = _as_matrix(S)
    try:
        factor = linalg.cho_factor(S, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularCovarianceError(
            "S is not positive definite; use a positive penalty (lam > 0)") from exc
    omega = linalg.cho_solve(factor, np.eye(S.shape[0]))
    omega = 0.5 * (omega + omega.T)
    if not np.all(np.isfinite(omega)) or np.min(np.linalg.eigvalsh(omega)) <= 0:
        raise SingularCovarianceError("S is numerically singular")
    viol = kkt_violation(omega, S, 0.0, sigma=S)
    return PrecisionEstimate(omega=omega, sigma=S.copy(), lam=0.0, iterations=0,
                             max_kkt_violation=viol, converged=True,
                             objective_trace=(objective(omega, S, 0.0),))


def lambda_max(S):
    """Smallest penalty at which the solution is diagonal."""
    S = _as_matrix(S)
    off = np.abs(S - np.diag(np.diag(S)))
    return float(off.max(initial=0.0))


def _cold_start(S, lam):
    # (1 - t) diag(S) + t S is positive definite for t < 1 and satisfies the
    # dual box |S - W| <= lam once t >= 1 - lam / lambda_max.
    lmax = lambda_max(S)
    t = 0.0 if lmax == 0.0 else max(0.0, 1.0 - lam / lmax)
    W = t * S + (1.0 - t) * np.diag(np.diag(S))
    return W, np.zeros_like(S)


def _solve(S, lam, W, B, tol, max_sweeps, inner_tol=INNER_TOL, max_inner=1000):
    trace = []
    omega = np.diag(1.0 / np.diag(W))
    viol = np.inf
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        change = _sweep(W, S, B, lam, inner_tol, max_inner)
        sweeps += 1
        omega = _omega_from_blocks(W, B)
        trace.append(objective(omega, S, lam))
        if change < tol:
            viol = kkt_violation(omega, S, lam)
            if viol <= tol:
                converged = True
                break
            # block inverses lag the outer iterate; tighten the lasso solves
            inner_tol = max(inner_tol * 0.1, 1e-15)
    if not converged:
        viol = kkt_violation(omega, S, lam)
    return PrecisionEstimate(omega=omega, sigma=W.copy(), lam=float(lam),
                             iterations=sweeps, max_kkt_violation=viol,
                             converged=converged, objective_trace=tuple(trace))


def glasso(S, lam, tol=DEFAULT_TOL, max_sweeps=DEFAULT_MAX_SWEEPS):
    """Solve the graphical lasso at a single penalty level.

    Parameters
    ----------
    S : CovarianceEstimate or array_like
        Symmetric ``p x p`` covariance (or correlation) matrix.
    lam : float
        Penalty on the off-diagonal entries. ``lam == 0`` returns the
        exact inverse and requires a positive definite ``S``.
    tol : float
        Convergence threshold for both the mean absolute change of the
        off-diagonal covariance iterate and the KKT certificate.
    max_sweeps : int
        Cap on outer sweeps. Hitting it returns the last iterate with
        ``converged=False``.

    Returns
    -------
    PrecisionEstimate
    """
    S = _as_matrix(S)
    if lam < 0:
        raise ValueError("penalty must be nonnegative")
    if lam == 0:
        return mle_inverse(S)
    if np.any(np.diag(S) <= 0):
        raise ValueError("S must have a strictly positive diagonal")
    W, B = _cold_start(S, lam)
    return _solve(S, float(lam), W, B, tol, max_sweeps)


def edge_set(estimate, zero_tol=DEFAULT_ZERO_TOL):
    """Edges ``(j, k)`` with ``|omega_jk| > zero_tol``."""
    omega = estimate.omega if isinstance(estimate, PrecisionEstimate) else np.asarray(estimate)
    return GraphSpec.from_adjacency(np.abs(omega) > zero_tol)


def regularization_path(S, lambdas, tol=DEFAULT_TOL, max_sweeps=DEFAULT_MAX_SWEEPS,
                        zero_tol=DEFAULT_ZERO_TOL):
    """Warm-started solutions along a strictly decreasing penalty grid.

    Between levels the covariance iterate is pulled toward ``S`` by the
    ratio of consecutive penalties, which keeps it positive definite and
    inside the next level's dual box.
    """
    S = _as_matrix(S)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if lambdas.ndim != 1 or lambdas.size == 0:
        raise ValueError("need a nonempty 1-d grid of penalties")
    if np.any(np.diff(lambdas) >= 0):
        raise ValueError("penalty grid must be strictly decreasing")
    if lambdas[-1] < 0:
        raise ValueError("penalties must be nonnegative")

    estimates = []
    W = B = None
    prev = None
    for lam in lambdas:
        try:
            if lam == 0:
                est = mle_inverse(S)
            else:
                if W is None:
                    W, B = _cold_start(S, lam)
                else:
                    ratio = lam / prev
                    W = ratio * W + (1.0 - ratio) * S
                est = _solve(S, float(lam), W, B, tol, max_sweeps)
                W = est.sigma.copy()
        except (linalg.LinAlgError, ValueError) as exc:
            raise type(exc)(f"at lambda={lam:g}: {exc}") from exc
        estimates.append(est)
        prev = lam
    counts = tuple(len(edge_set(est, zero_tol)) for est in estimates)
    return RegularizationPath(lambdas=lambdas, estimates=tuple(estimates), edge_counts=counts)
