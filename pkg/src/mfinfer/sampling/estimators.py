"""Self-normalised estimators and their error/performance diagnostics.

For weighted samples (w_i, G_i) the estimate is sum(w G) / sum(w).  Its
leading-order mean squared error is mean(w^2 (G - Ghat)^2) / mean(w)^2 / N,
and the cost-normalised performance coefficient multiplies the per-sample
variance term by the mean per-iteration cost:
mean(C) * mean(w^2 (G - Ghat)^2) / mean(w)^2.
"""

from __future__ import annotations

import numpy as np

from .types import DegenerateSampleError, EstimatorReport, SampleSet

__all__ = [
    "estimate_G",
    "estimate_mse",
    "estimate_j_coefficient",
    "summarize",
]


def _arrays(samples, g=None):
    if isinstance(samples, SampleSet):
        sample_list = samples.samples
    else:
        sample_list = list(samples)
    if not sample_list:
        raise DegenerateSampleError("no samples")
    w = np.array([s.weight for s in sample_list], dtype=np.float64)
    if g is None:
        gv = np.array([s.g_value for s in sample_list], dtype=np.float64)
    else:
        gv = np.array([float(g(s.draw.theta)) for s in sample_list], dtype=np.float64)
    c = np.array([s.total_cost for s in sample_list], dtype=np.float64)
    return w, gv, c


def estimate_G(samples, g=None) -> float:
    """Self-normalised estimate of the posterior expectation of G."""
    w, gv, _ = _arrays(samples, g)
    wsum = float(w.sum())
    if wsum == 0.0:
        raise DegenerateSampleError("all weights are zero")
    return float(np.dot(w, gv) / wsum)


def estimate_mse(samples, g=None) -> float:
    """Plug-in leading-order mean squared error of the estimate."""
    w, gv, _ = _arrays(samples, g)
    n = w.shape[0]
    wbar = float(w.mean())
    if wbar == 0.0:
        raise DegenerateSampleError("all weights are zero")
    g_hat = float(np.dot(w, gv) / w.sum())
    num = float(np.mean((w * (gv - g_hat)) ** 2))
    return num / (wbar * wbar) / n


def estimate_j_coefficient(samples, g=None) -> float:
    """Cost-normalised performance coefficient (budget times MSE)."""
    w, gv, c = _arrays(samples, g)
    wbar = float(w.mean())
    if wbar == 0.0:
        raise DegenerateSampleError("all weights are zero")
    g_hat = float(np.dot(w, gv) / w.sum())
    num = float(np.mean((w * (gv - g_hat)) ** 2))
    return float(c.mean()) * num / (wbar * wbar)


def summarize(samples, g=None) -> EstimatorReport:
    w, gv, c = _arrays(samples, g)
    return EstimatorReport(
        g_hat=estimate_G(samples, g),
        mean_weight=float(w.mean()),
        variance_estimate=estimate_mse(samples, g),
        j_coefficient=estimate_j_coefficient(samples, g),
        n=w.shape[0],
        total_cost=float(c.sum()),
    )
