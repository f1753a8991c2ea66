"""Enzyme kinetics model pair.

High fidelity: S + E <-> C -> P + E with mass-action propensities
(k1*S*E, k_minus1*C, k2*C), started from (S, E, C, P) = (100, 5, 0, 0).

Low fidelity: the reduced single-species conversion S -> P with saturating
propensity (k2 * min(S, E0) / (K + S)) * S where K = (k_minus1 + k2) / k1,
started from (S, P) = (100, 0).

Both models are summarised by the times at which the product count reaches
10, 20, ..., 100.  The coupling shares the product-formation channel's
unit-rate Poisson path between fidelities: repeated high-fidelity draws
against one low-fidelity run reuse that fixed path (extending it lazily
from its own stream when they outrun it) while drawing fresh paths for the
binding and unbinding channels.
"""

from __future__ import annotations

from dataclasses import dataclass

from .network import KIND_MASS_ACTION, KIND_SATURATING, Propensity, Reaction, ReactionNetwork
from .paths import UnitPoissonPath
from .simulate import (
    DEFAULT_CLAMP_TIME,
    DEFAULT_EVENT_CAP,
    SummarySpec,
    TrajectorySummary,
    simulate,
)

__all__ = ["PRODUCT_LEVELS", "EnzymeParams", "EnzymePair", "enzyme_hi", "enzyme_lo"]

PRODUCT_LEVELS = tuple(float(10 * n) for n in range(1, 11))


@dataclass(frozen=True)
class EnzymeParams:
    k1: float
    k_minus1: float
    k2: float

    @staticmethod
    def from_vector(theta) -> "EnzymeParams":
        k1, k_minus1, k2 = (float(v) for v in theta)
        if k1 <= 0 or k_minus1 <= 0 or k2 <= 0:
            raise ValueError("rate constants must be positive")
        return EnzymeParams(k1, k_minus1, k2)


def enzyme_hi(theta, s0: int = 100, e0: int = 5) -> ReactionNetwork:
    """Full binding/unbinding/conversion network."""
    p = EnzymeParams.from_vector(theta)
    return ReactionNetwork(
        species=("S", "E", "C", "P"),
        reactions=(
            Reaction(
                (-1, -1, 1, 0),
                Propensity(KIND_MASS_ACTION, p.k1, orders=(1, 1, 0, 0)),
            ),
            Reaction(
                (1, 1, -1, 0),
                Propensity(KIND_MASS_ACTION, p.k_minus1, orders=(0, 0, 1, 0)),
            ),
            Reaction(
                (0, 1, -1, 1),
                Propensity(KIND_MASS_ACTION, p.k2, orders=(0, 0, 1, 0)),
            ),
        ),
        initial_state=(s0, e0, 0, 0),
        conservations=(((0, 1, 1, 0), e0), ((1, 0, 1, 1), s0)),
    )


def enzyme_lo(theta, s0: int = 100, e0: int = 5) -> ReactionNetwork:
    """Reduced conversion network with the saturating rate law."""
    p = EnzymeParams.from_vector(theta)
    half_sat = (p.k_minus1 + p.k2) / p.k1
    return ReactionNetwork(
        species=("S", "P"),
        reactions=(
            Reaction(
                (-1, 1),
                Propensity(
                    KIND_SATURATING,
                    p.k2,
                    species=0,
                    cap=float(e0),
                    half_sat=half_sat,
                ),
            ),
        ),
        initial_state=(s0, 0),
        conservations=(((1, 1), s0),),
    )


# Index of the product-formation channel in the high-fidelity network; it
# shares its Poisson path with the single low-fidelity channel.
HI_SHARED_CHANNEL = 2


class EnzymePair:
    """Coupled low/high-fidelity enzyme simulators with common settings."""

    def __init__(
        self,
        s0: int = 100,
        e0: int = 5,
        levels=PRODUCT_LEVELS,
        event_cap: int = DEFAULT_EVENT_CAP,
        clamp_time: float = DEFAULT_CLAMP_TIME,
        use_backend: str | None = None,
    ):
        self.s0 = s0
        self.e0 = e0
        self.levels = tuple(float(v) for v in levels)
        self.event_cap = event_cap
        self.clamp_time = clamp_time
        self.use_backend = use_backend

    def lo_summary_spec(self) -> SummarySpec:
        return SummarySpec.counts(1, self.levels)

    def hi_summary_spec(self) -> SummarySpec:
        return SummarySpec.counts(3, self.levels)

    def simulate_lo(self, theta, streams) -> tuple[TrajectorySummary, UnitPoissonPath]:
        """Run the reduced model; returns (summary, shared conversion path)."""
        network = enzyme_lo(theta, self.s0, self.e0)
        shared = UnitPoissonPath(streams.stream())
        out = simulate(
            network,
            theta,
            paths=[shared],
            summary=self.lo_summary_spec(),
            event_cap=self.event_cap,
            clamp_time=self.clamp_time,
            use_backend=self.use_backend,
        )
        return out, shared

    def simulate_hi_coupled(
        self, theta, shared: UnitPoissonPath, streams
    ) -> TrajectorySummary:
        """Run the full model reusing the low-fidelity conversion path.

        Fresh binding/unbinding paths come from ``streams``, so repeated
        calls against the same shared path are conditionally independent
        given the low-fidelity run.
        """
        network = enzyme_hi(theta, self.s0, self.e0)
        paths = [
            UnitPoissonPath(streams.stream()),
            UnitPoissonPath(streams.stream()),
            shared,
        ]
        return simulate(
            network,
            theta,
            paths=paths,
            summary=self.hi_summary_spec(),
            event_cap=self.event_cap,
            clamp_time=self.clamp_time,
            use_backend=self.use_backend,
        )

    def simulate_hi(self, theta, streams) -> TrajectorySummary:
        """Run the full model with all-fresh paths (uncoupled)."""
        network = enzyme_hi(theta, self.s0, self.e0)
        return simulate(
            network,
            theta,
            streams=streams,
            summary=self.hi_summary_spec(),
            event_cap=self.event_cap,
            clamp_time=self.clamp_time,
            use_backend=self.use_backend,
        )


def simulate_coupled_pair(
    theta, streams, pair: EnzymePair | None = None
) -> tuple[TrajectorySummary, TrajectorySummary]:
    """One low-fidelity run and one coupled high-fidelity run."""
    if pair is None:
        pair = EnzymePair()
    lo, shared = pair.simulate_lo(theta, streams)
    hi = pair.simulate_hi_coupled(theta, shared, streams)
    return lo, hi
