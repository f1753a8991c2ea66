"""Importance sampling loops, single fidelity and multifidelity.

Each iteration draws its randomness from counter-based streams keyed by
(seed, iteration index), so reruns are bit-exact and iterations are
independent given a frozen escalation schedule.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..streams import StreamFactory
from .types import (
    MultifidelityRecord,
    ParameterDraw,
    SampleSet,
    SimulationOutput,
    StopRule,
    WeightedSample,
)

__all__ = [
    "multifidelity_weight",
    "single_fidelity_iteration",
    "mf_simulate",
    "run_sampler",
    "run_mf_sampler",
    "lo_features",
]


def multifidelity_weight(omega_lo: float, mu: float, omega_hi_list) -> float:
    """Low-fidelity weighting plus the scaled high-fidelity correction.

    omega_lo + (1/mu) * sum_i (omega_hi_i - omega_lo); with an empty
    correction list this is just omega_lo.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    corr = sum(w_hi - omega_lo for w_hi in omega_hi_list)
    return omega_lo + corr / mu


def _draw_parameter(prior, proposal, rng) -> ParameterDraw:
    theta = np.asarray(proposal.sample(rng), dtype=np.float64)
    return ParameterDraw(
        theta=theta,
        prior_density=float(prior.pdf(theta)),
        proposal_density=float(proposal.pdf(theta)),
    )


def single_fidelity_iteration(
    prior,
    proposal,
    simulator: Callable,
    weighting: Callable,
    g_fn: Callable,
    replicates: int,
    streams,
    index: int = 0,
) -> WeightedSample:
    """One draw, one simulated replicate batch, one importance weight."""
    rng = streams.stream()
    draw = _draw_parameter(prior, proposal, rng)
    outputs = [simulator(draw.theta, streams) for _ in range(replicates)]
    omega = float(weighting(draw.theta, [o.y for o in outputs]))
    weight = draw.density_ratio * omega
    return WeightedSample(
        index=index,
        draw=draw,
        weight=weight,
        g_value=float(g_fn(draw.theta)),
        total_cost=float(sum(o.cost for o in outputs)),
        omega=omega,
        record=None,
    )


def lo_features(theta: np.ndarray, y_lo_batch: list[SimulationOutput]) -> np.ndarray:
    """Schedule features: parameters then mean low-fidelity summary."""
    if len(y_lo_batch) == 1:
        ys = np.asarray(y_lo_batch[0].y, dtype=np.float64)
    else:
        ys = np.mean([np.asarray(o.y, dtype=np.float64) for o in y_lo_batch], axis=0)
    return np.concatenate([np.asarray(theta, dtype=np.float64), ys])


def mf_simulate(
    draw: ParameterDraw,
    pair,
    weighting_lo: Callable,
    weighting_hi: Callable,
    mean_fn,
    m_law,
    replicates: int,
    streams,
    rng,
) -> tuple[MultifidelityRecord, np.ndarray | None, int]:
    """Simulate one multifidelity iteration's record.

    Runs the low-fidelity replicate batch, evaluates the escalation mean mu
    at (theta, low-fidelity features), draws the escalation count m from
    ``rng`` (the caller's parameter stream), and runs m coupled
    high-fidelity replicate batches (each pairwise coupled to the
    low-fidelity batch).  m = 0 therefore skips high fidelity entirely.
    Returns (record, features, cell index); features are assembled only
    when the mean function declares ``uses_features``, since they exist to
    feed partition fits.
    """
    theta = draw.theta
    lo_outputs: list[SimulationOutput] = []
    contexts = []
    for _ in range(replicates):
        out, ctx = pair.simulate_lo(theta, streams)
        lo_outputs.append(out)
        contexts.append(ctx)
    omega_lo = float(weighting_lo(theta, [o.y for o in lo_outputs]))
    if getattr(mean_fn, "uses_features", True):
        features = lo_features(theta, lo_outputs)
    else:
        features = None
    cell, mu = mean_fn.evaluate(theta, features)
    m = int(m_law.sample(mu, rng))
    hi_batches: list[tuple[list[SimulationOutput], float]] = []
    for _ in range(m):
        batch = [
            pair.simulate_hi_coupled(theta, ctx, streams) for ctx in contexts
        ]
        omega_hi = float(weighting_hi(theta, [o.y for o in batch]))
        hi_batches.append((batch, omega_hi))
    record = MultifidelityRecord(
        y_lo_batch=lo_outputs,
        omega_lo=omega_lo,
        mu=float(mu),
        m=m,
        hi_batches=hi_batches,
    )
    return record, features, cell


def mf_iteration(
    prior,
    proposal,
    pair,
    weighting_lo,
    weighting_hi,
    g_fn,
    mean_fn,
    m_law,
    replicates: int,
    streams,
    index: int = 0,
    slim: bool = False,
) -> WeightedSample:
    rng_draw = streams.stream()
    draw = _draw_parameter(prior, proposal, rng_draw)
    record, features, cell = mf_simulate(
        draw, pair, weighting_lo, weighting_hi, mean_fn, m_law, replicates, streams,
        rng_draw,
    )
    omega = multifidelity_weight(
        record.omega_lo, record.mu, record.omega_hi_list
    )
    sample = WeightedSample(
        index=index,
        draw=draw,
        weight=draw.density_ratio * omega,
        g_value=float(g_fn(draw.theta)),
        total_cost=record.total_cost,
        omega=omega,
        record=record,
        features=features,
        cell=cell,
    )
    if slim:
        _strip_outputs(record)
    return sample


_EMPTY_Y = np.empty(0)
_EMPTY_Y.setflags(write=False)


def _strip_outputs(record: MultifidelityRecord) -> None:
    """Drop raw summary vectors in place, keeping weights and the cost ledger."""
    for o in record.y_lo_batch:
        o.y = _EMPTY_Y
    for batch, _ in record.hi_batches:
        for o in batch:
            o.y = _EMPTY_Y


class ConstantMean:
    """Mean function mu(theta, y_lo) = constant, cell index 1.

    Declares ``uses_features = False`` so the sampler can skip assembling
    feature vectors that nothing will read.
    """

    uses_features = False

    def __init__(self, mu: float = 1.0):
        if not mu > 0:
            raise ValueError("mu must be positive")
        self.mu = float(mu)

    def evaluate(self, theta, features) -> tuple[int, float]:
        return 1, self.mu


def run_sampler(
    prior,
    proposal,
    simulator,
    weighting,
    g_fn,
    *,
    stop: StopRule | Callable[[int, float], bool],
    seed: int,
    replicates: int = 1,
    sink=None,
) -> SampleSet:
    """Single-fidelity importance sampling loop."""
    done = stop.done if isinstance(stop, StopRule) else stop
    factory = StreamFactory(seed)
    samples: list[WeightedSample] = []
    cost = 0.0
    i = 0
    while not done(i, cost):
        i += 1
        sample = single_fidelity_iteration(
            prior,
            proposal,
            simulator,
            weighting,
            g_fn,
            replicates,
            factory.iteration(i),
            index=i,
        )
        cost += sample.total_cost
        samples.append(sample)
        if sink is not None:
            sink(sample)
    return SampleSet(samples=samples, seed=seed, kind="single")


def run_mf_sampler(
    prior,
    proposal,
    pair,
    weighting_lo,
    weighting_hi,
    g_fn,
    *,
    mean_fn,
    m_law,
    stop: StopRule | Callable[[int, float], bool],
    seed: int,
    replicates: int = 1,
    slim: bool = False,
    sink=None,
) -> SampleSet:
    """Multifidelity sampling loop with a frozen escalation schedule."""
    done = stop.done if isinstance(stop, StopRule) else stop
    factory = StreamFactory(seed)
    samples: list[WeightedSample] = []
    cost = 0.0
    i = 0
    while not done(i, cost):
        i += 1
        sample = mf_iteration(
            prior,
            proposal,
            pair,
            weighting_lo,
            weighting_hi,
            g_fn,
            mean_fn,
            m_law,
            replicates,
            factory.iteration(i),
            index=i,
            slim=slim,
        )
        cost += sample.total_cost
        samples.append(sample)
        if sink is not None:
            sink(sample)
    return SampleSet(samples=samples, seed=seed, kind="multifidelity")
