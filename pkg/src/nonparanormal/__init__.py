"""Sparse undirected graphs for non-Gaussian continuous data.

Each column is pushed through a Winsorized empirical cdf and the normal
quantile, and the covariance of the result is handed to a graphical lasso.
"""

__version__ = "0.1.0"

from .estimator import (
    CovarianceEstimate,
    DataMatrix,
    DegenerateColumnError,
    MarginalTransform,
    empirical_cdf,
    fit_marginal_transform,
    sample_covariance,
    transformed_correlation,
    transformed_covariance,
    truncation_level,
    winsorized_cdf,
)
from .glasso import (
    PrecisionEstimate,
    RegularizationPath,
    SingularCovarianceError,
    edge_set,
    glasso,
    mle_inverse,
    regularization_path,
)
from .graphs import GraphSpec
from .metrics import fp_fn, oracle_scan, roc_points, symmetric_difference
from .synthetic import GeneratorConfig, TransformSpec, npn_sample

__all__ = [
    "CovarianceEstimate", "DataMatrix", "DegenerateColumnError", "GeneratorConfig",
    "GraphSpec", "MarginalTransform", "PrecisionEstimate", "RegularizationPath",
    "SingularCovarianceError", "TransformSpec", "edge_set", "empirical_cdf",
    "fit_marginal_transform", "fp_fn", "glasso", "mle_inverse", "npn_sample",
    "oracle_scan", "regularization_path", "roc_points", "sample_covariance",
    "symmetric_difference", "transformed_correlation", "transformed_covariance",
    "truncation_level", "winsorized_cdf",
]
