"""Priors and proposals for the samplers.

A distribution exposes ``sample(rng) -> ndarray`` and ``pdf(theta) -> float``
(a probability mass for discrete supports).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["UniformBox", "TwoPoint"]


@dataclass(frozen=True)
class UniformBox:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("bound lengths differ")
        if not all(l < u for l, u in zip(self.lower, self.upper)):
            raise ValueError("lower bounds must be below upper bounds")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return lo + (hi - lo) * rng.random(self.dim)

    def pdf(self, theta) -> float:
        theta = np.asarray(theta, dtype=np.float64)
        inside = all(
            l <= v <= u for v, l, u in zip(theta, self.lower, self.upper)
        )
        if not inside:
            return 0.0
        vol = float(np.prod(np.asarray(self.upper) - np.asarray(self.lower)))
        return 1.0 / vol


@dataclass(frozen=True)
class TwoPoint:
    """Uniform distribution over two scalar atoms."""

    values: tuple[float, float]

    def __post_init__(self):
        # Samples share two read-only arrays instead of allocating per draw.
        atoms = []
        for v in self.values:
            arr = np.array([v], dtype=np.float64)
            arr.setflags(write=False)
            atoms.append(arr)
        object.__setattr__(self, "_atoms", tuple(atoms))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self._atoms[1] if rng.random() < 0.5 else self._atoms[0]

    def pdf(self, theta) -> float:
        v = float(theta[0])
        return 0.5 if v in self.values else 0.0
