"""Synthetic nonparanormal data: neighborhood graphs, their precision
matrices, and the Gaussian-cdf / symmetric-power marginal transforms."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .estimator import DataMatrix
from .gaussian import DEFAULT_RULE, gaussian_weighted_integral, std_normal_cdf
from .graphs import GraphSpec

EDGE_WEIGHT = 0.245
KERNEL_PEAK = 1.0 / math.sqrt(2.0 * math.pi)


class NotPositiveDefiniteError(ValueError):
    pass


def make_rng(seed, *keys):
    """Philox generator keyed by ``seed`` and any further integer keys
    (e.g. sample size and replicate index)."""
    entropy = [int(seed), *(int(k) for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class GeneratorConfig:
    p: int = 40
    s: float = 0.125
    max_degree: int = 4
    mu0: float = 1.5
    seed: int = 0

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be at least 2")
        if not self.s > 0:
            raise ValueError("s must be positive")
        if self.max_degree < 1:
            raise ValueError("max_degree must be at least 1")

    def mean_vector(self):
        mu0 = np.asarray(self.mu0, dtype=np.float64)
        return np.broadcast_to(mu0, (self.p,)).copy()


@dataclass(frozen=True)
class TransformSpec:
    """Marginal transform family. ``kind`` is ``identity``, ``gaussian_cdf`` or ``power``."""

    kind: str = "identity"
    mu_g0: float = 0.05
    sigma_g0: float = 0.4
    alpha: float = 3.0

    def __post_init__(self):
        if self.kind not in ("identity", "gaussian_cdf", "power"):
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if self.kind == "gaussian_cdf" and not self.sigma_g0 > 0:
            raise ValueError("sigma_g0 must be positive")
        if self.kind == "power" and not self.alpha > 0:
            raise ValueError("alpha must be positive")


def edge_probabilities(points, s):
    """Kernel inclusion probabilities for every vertex pair (upper triangle)."""
    diff = points[:, None, :] - points[None, :, :]
    sq = np.sum(diff * diff, axis=-1)
    prob = KERNEL_PEAK * np.exp(-sq / (2.0 * s))
    assert np.all(prob <= KERNEL_PEAK)
    return prob


@dataclass(frozen=True)
class NeighborhoodGraph:
    """A generated graph along with what was needed to build it."""

    graph: GraphSpec
    points: np.ndarray
    removed: tuple = field(default=())


def neighborhood_graph(config, rng):
    """Random geometric graph on ``config.p`` uniform points in the unit square.

    Each pair ``(i, j)`` is included independently with probability
    ``exp(-|y_i - y_j|^2 / (2 s)) / sqrt(2 pi)``. While some vertex exceeds
    ``config.max_degree``, a maximum-degree vertex is drawn uniformly and
    one of its edges is removed uniformly at random.

    Returns
    -------
    NeighborhoodGraph
        The capped graph, the vertex locations and the removed edges in
        removal order.
    """
    p = config.p
    points = rng.uniform(0.0, 1.0, size=(p, 2))
    prob = edge_probabilities(points, config.s)
    rows, cols = np.triu_indices(p, k=1)
    keep = rng.uniform(size=rows.size) < prob[rows, cols]
    adj = np.zeros((p, p), dtype=bool)
    adj[rows[keep], cols[keep]] = True
    adj |= adj.T

    removed = []
    deg = adj.sum(axis=1)
    while deg.max() > config.max_degree:
        worst = np.flatnonzero(deg == deg.max())
        v = int(rng.choice(worst))
        w = int(rng.choice(np.flatnonzero(adj[v])))
        adj[v, w] = adj[w, v] = False
        deg[v] -= 1
        deg[w] -= 1
        removed.append((min(v, w), max(v, w)))
    return NeighborhoodGraph(GraphSpec.from_adjacency(adj), points, tuple(removed))


def precision_from_graph(graph, weight=EDGE_WEIGHT):
    """Unit-diagonal precision matrix with ``weight`` on every edge."""
    if graph.p > 1 and graph.degrees().max(initial=0) > 4:
        raise ValueError("precision construction requires maximum degree <= 4")
    omega = np.eye(graph.p)
    for j, k in graph.edges:
        omega[j, k] = omega[k, j] = weight
    if np.linalg.eigvalsh(omega).min() <= 0:
        raise NotPositiveDefiniteError("generated precision matrix is not positive definite")
    return omega


def build_transform_g(spec, mu_j, sigma_j, rule=DEFAULT_RULE):
    """Marginal map ``g_j`` sending ``N(mu_j, sigma_j^2)`` to a variable with
    the same mean and standard deviation.

    ``sigma_j`` is the marginal standard deviation. Centering and scaling
    constants are Gaussian expectations computed by quadrature.
    """
    if not sigma_j > 0:
        raise ValueError("sigma_j must be positive")
    if spec.kind == "identity":
        return lambda z: np.asarray(z, dtype=np.float64)

    if spec.kind == "gaussian_cdf":
        def g0(t):
            return std_normal_cdf((np.asarray(t) - spec.mu_g0) / spec.sigma_g0)

        center = gaussian_weighted_integral(g0, mu_j, sigma_j, rule)
        var = gaussian_weighted_integral(lambda t: (g0(t) - center) ** 2, mu_j, sigma_j, rule)
        if not (np.isfinite(center) and np.isfinite(var) and var > 0):
            raise ValueError("cdf transform normalization is degenerate")
        scale = sigma_j / math.sqrt(var)

        def g(z):
            return scale * (g0(z) - center) + mu_j
        return g

    alpha = spec.alpha

    def g0(t):
        t = np.asarray(t, dtype=np.float64)
        return np.sign(t) * np.abs(t) ** alpha

    second = gaussian_weighted_integral(lambda t: g0(t - mu_j) ** 2, mu_j, sigma_j, rule)
    if not (np.isfinite(second) and second > 0):
        raise ValueError("power transform normalization is degenerate")
    scale = sigma_j / math.sqrt(second)

    def g(z):
        return scale * g0(np.asarray(z, dtype=np.float64) - mu_j) + mu_j
    return g


def gaussian_sample(n, mu0, sigma0, rng):
    """``n`` draws from ``N(mu0, sigma0)`` through a lower Cholesky factor."""
    try:
        chol = linalg.cholesky(np.asarray(sigma0, dtype=np.float64), lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("sigma0 is not positive definite") from exc
    eps = rng.standard_normal(size=(n, chol.shape[0]))
    return np.asarray(mu0, dtype=np.float64) + eps @ chol.T


@dataclass(frozen=True)
class NpnSample:
    data: DataMatrix
    latent: np.ndarray


def npn_sample(n, mu0, sigma0, spec, rng, return_latent=False):
    """Draw ``n`` rows ``X_j = g_j(Z_j)`` with ``Z ~ N(mu0, sigma0)``.

    Every column uses the same transform family; ``g_j`` is normalized with
    ``mu0[j]`` and ``sqrt(sigma0[j, j])``. With ``return_latent`` the
    Gaussian draw ``Z`` (the true transform applied to ``X``) is returned too.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    sigma0 = np.asarray(sigma0, dtype=np.float64)
    mu0 = np.broadcast_to(np.asarray(mu0, dtype=np.float64), (sigma0.shape[0],))
    z = gaussian_sample(n, mu0, sigma0, rng)
    if spec.kind == "identity":
        x = z.copy()
    else:
        sd = np.sqrt(np.diag(sigma0))
        x = np.column_stack([build_transform_g(spec, mu0[j], sd[j])(z[:, j])
                             for j in range(z.shape[1])])
    data = DataMatrix(x)
    if return_latent:
        return NpnSample(data=data, latent=z)
    return data


@dataclass(frozen=True)
class SyntheticProblem:
    graph: GraphSpec
    omega0: np.ndarray
    sigma0: np.ndarray
    mu0: np.ndarray
    removed: tuple = ()


def synthetic_problem(config, rng):
    """Graph, precision ``omega0`` and covariance ``sigma0 = omega0^-1``."""
    generated = neighborhood_graph(config, rng)
    omega0 = precision_from_graph(generated.graph)
    sigma0 = linalg.inv(omega0)
    sigma0 = 0.5 * (sigma0 + sigma0.T)
    return SyntheticProblem(graph=generated.graph, omega0=omega0, sigma0=sigma0,
                            mu0=config.mean_vector(), removed=generated.removed)
