"""Model bundles: priors, simulators, and weightings behind one facade.

A bundle adapts a concrete model (the enzyme pair, the coin, or a
network loaded from a file) to what the sampling loops expect: draws
from a prior, simulators returning priced outputs, a quantity of
interest, and named schedule features.  Costs are priced either in
simulated reaction events (deterministic, the default) or in measured
wall-clock seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .coin import CoinModel
from .config import ModelConfig, RunConfig, WeightingConfig
from .distributions import UniformBox
from .gillespie.enzyme import PRODUCT_LEVELS, EnzymePair
from .gillespie.netfile import load_network
from .gillespie.network import Reaction, ReactionNetwork
from .gillespie.simulate import simulate
from .sampling.types import SimulationOutput
from .weightings import (
    ABCConfig,
    BSLConfig,
    make_abc_weighting,
    make_bsl_weighting,
    pseudo_marginal_weight,
)

__all__ = [
    "ENZYME_Y0",
    "ENZYME_PRIOR",
    "ModelBundle",
    "EnzymeAdapter",
    "build_bundle",
    "build_weighting",
]

# Observed first-passage times of the product count through 10..100.
ENZYME_Y0 = (1.73, 3.80, 5.95, 8.10, 11.17, 12.92, 15.50, 17.75, 20.17, 23.67)

ENZYME_PRIOR = UniformBox(lower=(10.0, 10.0, 0.1), upper=(100.0, 100.0, 10.0))


def _price(summary, cost_unit: str) -> float:
    if cost_unit == "wallclock":
        return float(summary.wallclock)
    return float(summary.event_count)


class EnzymeAdapter:
    """Couples the enzyme pair to the sampler and prices its runs."""

    def __init__(self, pair: EnzymePair, cost_unit: str = "events"):
        if cost_unit not in ("events", "wallclock"):
            raise ValueError(f"unknown cost unit {cost_unit!r}")
        self.pair = pair
        self.cost_unit = cost_unit

    def _wrap(self, summary) -> SimulationOutput:
        return SimulationOutput(
            y=summary.y,
            cost=_price(summary, self.cost_unit),
            wallclock=summary.wallclock,
        )

    def simulate_lo(self, theta, streams):
        summary, shared = self.pair.simulate_lo(theta, streams)
        return self._wrap(summary), shared

    def simulate_hi_coupled(self, theta, shared, streams) -> SimulationOutput:
        return self._wrap(self.pair.simulate_hi_coupled(theta, shared, streams))

    def simulate_hi(self, theta, streams) -> SimulationOutput:
        return self._wrap(self.pair.simulate_hi(theta, streams))

    def simulate_lo_only(self, theta, streams) -> SimulationOutput:
        out, _ = self.simulate_lo(theta, streams)
        return out


class _NetworkSimulator:
    """Single-fidelity simulator for a network loaded from a file."""

    def __init__(self, build, summary, cost_unit: str):
        self.build = build
        self.summary = summary
        self.cost_unit = cost_unit

    def __call__(self, theta, streams) -> SimulationOutput:
        out = simulate(self.build(theta), theta, streams=streams, summary=self.summary)
        return SimulationOutput(
            y=out.y, cost=_price(out, self.cost_unit), wallclock=out.wallclock
        )


@dataclass
class ModelBundle:
    name: str
    prior: object
    g_fn: object
    y0: np.ndarray
    simulate_hi: object
    simulate_lo: object | None = None
    pair: object | None = None
    feature_names: tuple[str, ...] | None = None


def _enzyme_bundle(cfg: ModelConfig, cost_unit: str) -> ModelBundle:
    pair = EnzymePair(s0=cfg.s0, e0=cfg.e0)
    adapter = EnzymeAdapter(pair, cost_unit)
    y0 = np.asarray(cfg.y0 if cfg.y0 is not None else ENZYME_Y0, dtype=np.float64)
    names = ("k1", "k_minus1", "k2") + tuple(f"y{i}" for i in range(1, len(PRODUCT_LEVELS) + 1))
    return ModelBundle(
        name="enzyme",
        prior=ENZYME_PRIOR,
        g_fn=lambda theta: float(theta[2]),
        y0=y0,
        simulate_hi=adapter.simulate_hi,
        simulate_lo=adapter.simulate_lo_only,
        pair=adapter,
        feature_names=names,
    )


def _coin_bundle(cfg: ModelConfig, cost_unit: str) -> ModelBundle:
    model = CoinModel()
    y0 = np.asarray(cfg.y0 if cfg.y0 is not None else (model.y0,), dtype=np.float64)

    def simulate_lo_only(theta, streams):
        out, _ = model.simulate_lo(theta, streams)
        return out

    return ModelBundle(
        name="coin",
        prior=model.prior(),
        g_fn=model.g_fn,
        y0=y0,
        simulate_hi=model.simulate_hi,
        simulate_lo=simulate_lo_only,
        pair=model,
        feature_names=("p", "y_lo"),
    )


def _network_bundle(cfg: ModelConfig, cost_unit: str) -> ModelBundle:
    network, _, prior_box, summary = load_network(cfg.path)
    if prior_box is None:
        raise ValueError(f"{cfg.path}: network file declares no prior")
    if summary is None:
        raise ValueError(f"{cfg.path}: network file declares no summary")
    if cfg.y0 is None:
        raise ValueError("network models need observed summaries in model.y0")
    prior = UniformBox(lower=tuple(prior_box[0]), upper=tuple(prior_box[1]))
    if cfg.g_index >= prior.dim:
        raise ValueError("model.g_index is out of range for the prior")

    def build(theta):
        theta = np.asarray(theta, dtype=np.float64)
        reactions = tuple(
            Reaction(rx.change, replace(rx.propensity, rate=float(theta[i])))
            for i, rx in enumerate(network.reactions)
        )
        return ReactionNetwork(
            species=network.species,
            reactions=reactions,
            initial_state=network.initial_state,
            conservations=network.conservations,
        )

    names = tuple(f"x{i}" for i in range(prior.dim)) + tuple(
        f"y{i}" for i in range(1, len(summary.thresholds) + 1)
    )
    return ModelBundle(
        name="network",
        prior=prior,
        g_fn=lambda theta: float(theta[cfg.g_index]),
        y0=np.asarray(cfg.y0, dtype=np.float64),
        simulate_hi=_NetworkSimulator(build, summary, cost_unit),
        feature_names=names,
    )


def build_bundle(cfg: RunConfig) -> ModelBundle:
    if cfg.model.name == "enzyme":
        return _enzyme_bundle(cfg.model, cfg.cost_unit)
    if cfg.model.name == "coin":
        return _coin_bundle(cfg.model, cfg.cost_unit)
    if cfg.model.name == "network":
        return _network_bundle(cfg.model, cfg.cost_unit)
    raise ValueError(f"unknown model {cfg.model.name!r}")


def build_weighting(cfg: WeightingConfig, y0):
    """The weighting callable and the replicate count it expects."""
    y0 = np.asarray(y0, dtype=np.float64)
    if cfg.kind == "abc":
        return make_abc_weighting(y0, ABCConfig(epsilon=cfg.epsilon)), cfg.replicates
    if cfg.kind == "bsl":
        return (
            make_bsl_weighting(
                y0, BSLConfig(replicates=cfg.replicates, covariance_jitter=cfg.covariance_jitter)
            ),
            cfg.replicates,
        )
    if cfg.kind == "pseudo-marginal":

        def weighting(theta, y_batch):
            values = [float(np.asarray(y).reshape(-1)[0]) for y in y_batch]
            return pseudo_marginal_weight(values)

        return weighting, cfg.replicates
    raise ValueError(f"unknown weighting {cfg.kind!r}")
