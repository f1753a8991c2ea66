"""Reaction network containers and propensity descriptors.

A reaction carries an integer state-change vector and a propensity.  The
propensity is either a descriptor interpreted identically by the compiled
kernel and the pure-Python fallback (mass action or the saturating
conversion form used by the reduced enzyme model), or an arbitrary Python
callable ``f(state, theta, t)``.  Networks whose reactions all carry
descriptors are eligible for the compiled kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KIND_MASS_ACTION",
    "KIND_SATURATING",
    "Propensity",
    "Reaction",
    "ReactionNetwork",
]

KIND_MASS_ACTION = 0
# rate * min(x[s], cap) / (half_sat + x[s]) * x[s]
KIND_SATURATING = 1


@dataclass(frozen=True)
class Propensity:
    """Descriptor of a coded propensity form.

    kind: KIND_MASS_ACTION or KIND_SATURATING.
    rate: rate constant (the leading factor).
    orders: per-species reactant orders (mass action only).
    species: species index the saturating form reads (saturating only).
    cap: saturation ceiling (saturating only).
    half_sat: half-saturation constant (saturating only).
    """

    kind: int
    rate: float
    orders: tuple[int, ...] = ()
    species: int = -1
    cap: float = 0.0
    half_sat: float = 0.0

    def __call__(self, x, theta=None, t=0.0) -> float:
        # Mirrors the kernel arithmetic exactly; see _core.pyx.
        if self.kind == KIND_MASS_ACTION:
            a = self.rate
            for s, order in enumerate(self.orders):
                xs = float(x[s])
                for e in range(order):
                    a = a * (xs - e)
            return a
        xs = float(x[self.species])
        mn = xs if xs < self.cap else self.cap
        return self.rate * mn / (self.half_sat + xs) * xs


@dataclass(frozen=True)
class Reaction:
    change: tuple[int, ...]
    propensity: object  # Propensity descriptor or callable

    @property
    def descriptor(self) -> Propensity | None:
        return self.propensity if isinstance(self.propensity, Propensity) else None


@dataclass
class ReactionNetwork:
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]
    initial_state: tuple[int, ...]
    # Linear invariants (coeffs, value): coeffs . state == value along every
    # trajectory.  Declared by the model constructors, checked in tests.
    conservations: tuple[tuple[tuple[int, ...], int], ...] = field(default=())

    def __post_init__(self):
        n = len(self.species)
        if len(self.initial_state) != n:
            raise ValueError("initial_state length does not match species")
        for r in self.reactions:
            if len(r.change) != n:
                raise ValueError("reaction change vector length does not match species")
        for coeffs, value in self.conservations:
            if int(np.dot(coeffs, self.initial_state)) != value:
                raise ValueError("conservation law does not hold at the initial state")
            for r in self.reactions:
                if int(np.dot(coeffs, r.change)) != 0:
                    raise ValueError("conservation law violated by a reaction")

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    def species_index(self, name: str) -> int:
        try:
            return self.species.index(name)
        except ValueError:
            raise KeyError(f"unknown species {name!r}") from None

    def stoich_matrix(self) -> np.ndarray:
        return np.array([r.change for r in self.reactions], dtype=np.int64)

    def all_coded(self) -> bool:
        return all(r.descriptor is not None for r in self.reactions)
