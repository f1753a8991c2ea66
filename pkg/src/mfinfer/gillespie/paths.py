"""Unit-rate Poisson paths for the random time-change representation.

Each reaction channel transforms one unit-rate Poisson process through its
integrated propensity.  A path memoises its arrival times and extends itself
lazily from a dedicated generator, so a path shared between a low-fidelity
channel and repeated high-fidelity draws always presents the same realisation
no matter which consumer forces the extension, or in what block sizes.
"""

from __future__ import annotations

import numpy as np

__all__ = ["UnitPoissonPath"]

_MIN_BLOCK = 64


class UnitPoissonPath:
    """Lazily realised arrival times of a unit-rate Poisson process."""

    def __init__(self, rng: np.random.Generator):
        self._rng = rng
        self._arrivals = np.empty(_MIN_BLOCK, dtype=np.float64)
        self._n = 0
        self._last = 0.0

    @property
    def n_realized(self) -> int:
        return self._n

    @property
    def arrivals(self) -> np.ndarray:
        """View of the realised arrivals (length ``n_realized``)."""
        return self._arrivals[: self._n]

    def ensure(self, n: int) -> None:
        """Realise at least ``n`` arrivals.

        The running sum is carried inside the cumulative sum so the values
        are identical whether arrivals are realised one at a time or in
        blocks.
        """
        if n <= self._n:
            return
        grow = max(n - self._n, self._n, _MIN_BLOCK)
        gaps = self._rng.standard_exponential(grow)
        block = np.cumsum(np.concatenate(([self._last], gaps)))[1:]
        need = self._n + grow
        if need > self._arrivals.shape[0]:
            new = np.empty(max(need, 2 * self._arrivals.shape[0]), dtype=np.float64)
            new[: self._n] = self._arrivals[: self._n]
            self._arrivals = new
        self._arrivals[self._n : need] = block
        self._n = need
        self._last = float(self._arrivals[self._n - 1])

    def arrival(self, index: int) -> float:
        """Return the ``index``-th arrival time (0-based)."""
        self.ensure(index + 1)
        return float(self._arrivals[index])

    def buffer(self) -> np.ndarray:
        """Backing array; entries past ``n_realized`` are undefined."""
        return self._arrivals
