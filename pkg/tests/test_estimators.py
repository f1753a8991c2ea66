"""Self-normalized estimator and its error/performance diagnostics."""

import numpy as np
import pytest

from mfinfer.sampling.estimators import (
    estimate_G,
    estimate_j_coefficient,
    estimate_mse,
    summarize,
)
from mfinfer.sampling.types import (
    DegenerateSampleError,
    ParameterDraw,
    SampleSet,
    WeightedSample,
)


def make_samples(weights, g_values, costs=None):
    if costs is None:
        costs = [1.0] * len(weights)
    draws = ParameterDraw(theta=np.zeros(1), prior_density=1.0, proposal_density=1.0)
    return [
        WeightedSample(index=i, draw=draws, weight=w, g_value=g, total_cost=c)
        for i, (w, g, c) in enumerate(zip(weights, g_values, costs))
    ]


def test_point_estimate_ignores_zero_weight():
    samples = make_samples([1.0, 0.0], [5.0, 7.0])
    assert estimate_G(samples) == pytest.approx(5.0)


def test_point_estimate_with_signed_weights():
    # (2*1 + (-1)*4) / (2 - 1) = -2
    samples = make_samples([2.0, -1.0], [1.0, 4.0])
    assert estimate_G(samples) == pytest.approx(-2.0)


def test_mse_hand_value():
    # w = {1, 1}, g = {0, 2}: g_hat = 1, each (g - g_hat)^2 = 1,
    # mse = (mean(w^2 * 1) / mean(w)^2) / 2 = 0.5
    samples = make_samples([1.0, 1.0], [0.0, 2.0])
    assert estimate_mse(samples) == pytest.approx(0.5)


def test_weight_scale_invariance():
    rng = np.random.default_rng(0)
    w = rng.random(50) + 0.1
    g = rng.normal(size=50)
    base = make_samples(w, g)
    scaled = make_samples(10.0 * w, g)
    assert estimate_G(scaled) == pytest.approx(estimate_G(base), rel=1e-12)
    assert estimate_mse(scaled) == pytest.approx(estimate_mse(base), rel=1e-12)
    assert estimate_j_coefficient(scaled) == pytest.approx(
        estimate_j_coefficient(base), rel=1e-12
    )


def test_j_equals_n_times_mse_at_unit_cost():
    rng = np.random.default_rng(1)
    n = 40
    samples = make_samples(rng.random(n) + 0.1, rng.normal(size=n))
    assert estimate_j_coefficient(samples) == pytest.approx(
        n * estimate_mse(samples), rel=1e-12
    )


def test_j_scales_with_mean_cost():
    rng = np.random.default_rng(2)
    n = 30
    w = rng.random(n) + 0.1
    g = rng.normal(size=n)
    unit = make_samples(w, g, costs=[1.0] * n)
    pricey = make_samples(w, g, costs=[3.0] * n)
    assert estimate_j_coefficient(pricey) == pytest.approx(
        3.0 * estimate_j_coefficient(unit), rel=1e-12
    )


def test_degenerate_inputs_raise():
    with pytest.raises(DegenerateSampleError):
        estimate_G([])
    with pytest.raises(DegenerateSampleError):
        estimate_G(make_samples([0.0, 0.0], [1.0, 2.0]))


def test_summarize_report():
    samples = make_samples([1.0, 1.0], [0.0, 2.0], costs=[2.0, 4.0])
    report = summarize(SampleSet(samples=samples, seed=0, kind="single"))
    assert report.n == 2
    assert report.g_hat == pytest.approx(1.0)
    assert report.mean_weight == pytest.approx(1.0)
    assert report.variance_estimate == pytest.approx(0.5)
    assert report.total_cost == pytest.approx(6.0)
    assert report.j_coefficient == pytest.approx(3.0 * 2 * 0.5, rel=1e-12)
