"""Scalar Gaussian numerics: density, distribution, quantile and
Gaussian-weighted quadrature."""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import erfc

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Acklam's rational approximation to the lower half of the normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _check_finite(t):
    t = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(t)):
        raise ValueError("Gaussian numerics require finite arguments")
    return t


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def std_normal_pdf(t):
    """Standard normal density, elementwise."""
    t = _check_finite(t)
    return _unwrap(_INV_SQRT_2PI * np.exp(-0.5 * t * t))


def std_normal_cdf(t):
    """Standard normal distribution function, elementwise.

    Evaluated as ``erfc(-t / sqrt(2)) / 2`` so both tails keep full
    relative precision and ``cdf(-t) == 1 - cdf(t)`` to rounding.
    """
    t = _check_finite(t)
    return _unwrap(0.5 * erfc(-t / _SQRT2))


def _lower_quantile(q):
    # q in (0, 0.5]; returns x <= 0
    x = np.empty_like(q)
    tail = q < _P_LOW
    mid = ~tail

    r = np.sqrt(-2.0 * np.log(q[tail]))
    num = ((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]
    den = (((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0
    x[tail] = num / den

    s = q[mid] - 0.5
    r = s * s
    num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    x[mid] = s * num / den

    # Two Halley steps on Phi(x) - q; the lower tail keeps erfc accurate.
    for _ in range(2):
        err = 0.5 * erfc(-x / _SQRT2) - q
        step = err * math.sqrt(2.0 * math.pi) * np.exp(0.5 * x * x)
        x = x - step / (1.0 + 0.5 * x * step)
    return x


def std_normal_quantile(u):
    """Inverse of the standard normal distribution function.

    Parameters
    ----------
    u : float or array_like
        Probabilities, each strictly inside (0, 1).

    Returns
    -------
    float or ndarray
        ``x`` with ``std_normal_cdf(x) == u`` up to rounding. The map is
        exactly odd about 0.5: the upper half is computed by reflection.

    Raises
    ------
    ValueError
        If any ``u`` lies outside the open unit interval. Empirical
        distribution functions must be Winsorized before calling this.
    """
    u = np.asarray(u, dtype=np.float64)
    if not np.all((u > 0.0) & (u < 1.0)):
        raise ValueError("quantile argument must lie strictly inside (0, 1)")
    flat = np.atleast_1d(u).ravel()
    upper = flat > 0.5
    q = np.where(upper, 1.0 - flat, flat)
    x = _lower_quantile(q)
    x = np.where(upper, -x, x)
    x[flat == 0.5] = 0.0
    return _unwrap(x.reshape(u.shape))


@dataclass(frozen=True)
class QuadratureRule:
    """Probability-weighted rule: ``sum(w * g(nodes)) ~ E[g(Z)]``, Z ~ N(0, 1)."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self):
        return len(self.nodes)


def gauss_hermite_rule(order=64):
    """Gauss-Hermite rule for the standard normal weight.

    Nodes are symmetrized so odd integrands vanish to rounding, and weights
    are normalized to sum to one.
    """
    if order < 1:
        raise ValueError("quadrature order must be positive")
    nodes, weights = hermegauss(order)
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    weights = weights / weights.sum()
    return QuadratureRule(nodes=nodes, weights=weights)


DEFAULT_RULE = gauss_hermite_rule(64)


def gaussian_weighted_integral(g, mu, sigma, rule=DEFAULT_RULE):
    """Approximate ``E[g(T)]`` for ``T ~ N(mu, sigma**2)``.

    ``g`` is called once with the array of mapped nodes ``mu + sigma * x``.
    Exact for polynomials of degree below ``2 * rule.order``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    values = np.asarray(g(mu + sigma * rule.nodes), dtype=np.float64)
    if values.shape != rule.nodes.shape:
        values = np.broadcast_to(values, rule.nodes.shape)
    if not np.all(np.isfinite(values)):
        raise ValueError("integrand is not finite at quadrature nodes")
    # symmetric pairing keeps odd integrands at exactly zero
    paired = 0.5 * (values + values[::-1]) * rule.weights
    return float(np.sum(paired))
