"""Simulation-based likelihood weightings.

A weighting maps a batch of simulated summaries and the observed data to a
nonnegative scalar whose conditional expectation given theta plays the role
of the (intractable) likelihood: an acceptance indicator average, a
synthetic Gaussian likelihood, or a pseudo-marginal density average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SingularCovarianceError",
    "ABCConfig",
    "BSLConfig",
    "abc_weight",
    "bsl_weight",
    "pseudo_marginal_weight",
    "make_abc_weighting",
    "make_bsl_weighting",
]

_LOG_2PI = math.log(2.0 * math.pi)


class SingularCovarianceError(np.linalg.LinAlgError):
    """Replicate covariance is singular and no jitter was allowed."""


@dataclass(frozen=True)
class ABCConfig:
    epsilon: float
    metric: str = "euclidean"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.metric != "euclidean":
            raise ValueError("only the euclidean metric is supported")


@dataclass(frozen=True)
class BSLConfig:
    replicates: int = 100
    covariance_jitter: float = 0.0

    def __post_init__(self):
        if self.replicates < 2:
            raise ValueError("synthetic likelihood needs at least 2 replicates")
        if self.covariance_jitter < 0:
            raise ValueError("covariance jitter must be nonnegative")


def abc_weight(y_batch, y0, epsilon: float) -> float:
    """Fraction of replicates strictly within epsilon of the data."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    y0 = np.asarray(y0, dtype=np.float64)
    batch = [np.asarray(y, dtype=np.float64) for y in y_batch]
    if not batch:
        raise ValueError("empty replicate batch")
    hits = sum(1 for y in batch if float(np.linalg.norm(y - y0)) < epsilon)
    return hits / len(batch)


def bsl_weight(y_batch, y0, jitter: float = 0.0) -> float:
    """Gaussian density of the data under the replicates' moments.

    Uses the empirical mean and the covariance with divisor K (the batch
    size).  A singular covariance raises unless a positive ``jitter`` is
    given, in which case ``jitter * I`` is added.  Evaluated in log space
    through a Cholesky factorisation.
    """
    y0 = np.asarray(y0, dtype=np.float64)
    batch = np.asarray([np.asarray(y, dtype=np.float64) for y in y_batch])
    k = batch.shape[0]
    if k < 2:
        raise ValueError("synthetic likelihood needs at least 2 replicates")
    d = batch.shape[1]
    mean = batch.mean(axis=0)
    centred = batch - mean
    cov = (centred.T @ centred) / k
    if jitter > 0:
        cov = cov + jitter * np.eye(d)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise SingularCovarianceError(
            "replicate covariance is singular; set a positive jitter"
        ) from None
    z = np.linalg.solve(chol, y0 - mean)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    log_density = -0.5 * (d * _LOG_2PI + log_det + float(z @ z))
    return math.exp(log_density)


def pseudo_marginal_weight(values) -> float:
    """Arithmetic mean of nonnegative density evaluations."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty value batch")
    if np.any(values < 0):
        raise ValueError("density values must be nonnegative")
    return float(values.mean())


def make_abc_weighting(y0, config: ABCConfig):
    """Weighting callable (theta, y_batch) -> weight for the samplers."""

    def weighting(theta, y_batch):
        return abc_weight(y_batch, y0, config.epsilon)

    return weighting


def make_bsl_weighting(y0, config: BSLConfig):
    def weighting(theta, y_batch):
        if len(y_batch) != config.replicates:
            raise ValueError(
                f"expected {config.replicates} replicates, got {len(y_batch)}"
            )
        return bsl_weight(y_batch, y0, config.covariance_jitter)

    return weighting
