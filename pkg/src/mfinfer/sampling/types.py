"""Core sample containers for the importance samplers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateSampleError",
    "ProposalSupportError",
    "ParameterDraw",
    "SimulationOutput",
    "MultifidelityRecord",
    "WeightedSample",
    "EstimatorReport",
    "SampleSet",
    "StopRule",
]


class DegenerateSampleError(RuntimeError):
    """All importance weights are zero; no estimate is defined."""


class ProposalSupportError(RuntimeError):
    """The proposal density vanished at its own draw."""


@dataclass(frozen=True, slots=True)
class ParameterDraw:
    theta: np.ndarray
    prior_density: float
    proposal_density: float

    def __post_init__(self):
        if self.prior_density < 0:
            raise ValueError("prior density must be nonnegative")
        if self.proposal_density <= 0:
            raise ProposalSupportError(
                "proposal density is zero at its own draw; the proposal does "
                "not cover its sample"
            )

    @property
    def density_ratio(self) -> float:
        return self.prior_density / self.proposal_density


@dataclass(slots=True)
class SimulationOutput:
    """Summary vector plus the cost ledger of one simulator call."""

    y: np.ndarray
    cost: float
    wallclock: float = 0.0

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError("cost must be nonnegative")


@dataclass(slots=True)
class MultifidelityRecord:
    """Everything one multifidelity iteration produced.

    ``hi_batches`` holds ``m`` entries, each the high-fidelity replicate
    batch (coupled pairwise to the low-fidelity batch) and its weighting
    value.
    """

    y_lo_batch: list[SimulationOutput]
    omega_lo: float
    mu: float
    m: int
    hi_batches: list[tuple[list[SimulationOutput], float]]

    @property
    def omega_hi_list(self) -> list[float]:
        return [w for _, w in self.hi_batches]

    @property
    def cost_lo(self) -> float:
        return float(sum(o.cost for o in self.y_lo_batch))

    @property
    def hi_batch_costs(self) -> list[float]:
        return [float(sum(o.cost for o in batch)) for batch, _ in self.hi_batches]

    @property
    def cost_hi_total(self) -> float:
        return float(sum(self.hi_batch_costs))

    @property
    def total_cost(self) -> float:
        return self.cost_lo + self.cost_hi_total


@dataclass(slots=True)
class WeightedSample:
    index: int
    draw: ParameterDraw
    weight: float
    g_value: float
    total_cost: float
    omega: float = 0.0
    record: MultifidelityRecord | None = None
    # Feature vector used by the escalation schedule (parameters followed by
    # the per-coordinate mean of the low-fidelity summaries).
    features: np.ndarray | None = None
    cell: int | None = None


@dataclass(frozen=True)
class EstimatorReport:
    g_hat: float
    mean_weight: float
    variance_estimate: float
    j_coefficient: float
    n: int
    total_cost: float


@dataclass
class SampleSet:
    samples: list[WeightedSample]
    seed: int
    kind: str  # "single" or "multifidelity"
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def total_cost(self) -> float:
        return float(sum(s.total_cost for s in self.samples))

    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.samples], dtype=np.float64)

    def g_values(self) -> np.ndarray:
        return np.array([s.g_value for s in self.samples], dtype=np.float64)

    def costs(self) -> np.ndarray:
        return np.array([s.total_cost for s in self.samples], dtype=np.float64)


@dataclass(frozen=True)
class StopRule:
    """Stop predicate over (completed iterations, cumulative cost)."""

    max_iterations: int | None = None
    max_cost: float | None = None

    def __post_init__(self):
        if self.max_iterations is None and self.max_cost is None:
            raise ValueError("stop rule needs max_iterations or max_cost")

    def done(self, iterations: int, cost: float) -> bool:
        if self.max_iterations is not None and iterations >= self.max_iterations:
            return True
        if self.max_cost is not None and cost >= self.max_cost:
            return True
        return False
