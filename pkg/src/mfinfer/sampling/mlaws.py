"""Laws for the escalation count M with conditional mean mu.

The correction term averages M high-fidelity weightings scaled by 1/mu;
any nonnegative integer law with E(M | theta, y_lo) = mu keeps the
estimator unbiased.  The conditional variance of M differs by law and
shows up in the cost-normalised performance coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["PoissonLaw", "BinomialLaw", "GeometricLaw", "FixedCountLaw", "law_from_name"]


@dataclass(frozen=True)
class PoissonLaw:
    name: str = "poisson"

    def sample(self, mu: float, rng) -> int:
        _check_mu(mu)
        return int(rng.poisson(mu))

    def conditional_variance(self, mu: float) -> float:
        return mu


@dataclass(frozen=True)
class BinomialLaw:
    """Binomial(m_max, mu / m_max); requires mu <= m_max."""

    m_max: int
    name: str = "binomial"

    def __post_init__(self):
        if self.m_max < 1:
            raise ValueError("m_max must be at least 1")

    def sample(self, mu: float, rng) -> int:
        _check_mu(mu)
        if mu > self.m_max:
            raise ValueError(f"mu={mu} exceeds m_max={self.m_max}")
        return int(rng.binomial(self.m_max, mu / self.m_max))

    def conditional_variance(self, mu: float) -> float:
        return mu * (1.0 - mu / self.m_max)


@dataclass(frozen=True)
class GeometricLaw:
    """Geometric on {0, 1, ...} with success probability 1 / (1 + mu)."""

    name: str = "geometric"

    def sample(self, mu: float, rng) -> int:
        _check_mu(mu)
        return int(rng.geometric(1.0 / (1.0 + mu))) - 1

    def conditional_variance(self, mu: float) -> float:
        return mu * (1.0 + mu)


@dataclass(frozen=True)
class FixedCountLaw:
    """Deterministic count, useful for reduction checks; ignores mu."""

    count: int
    name: str = "fixed"

    def sample(self, mu: float, rng) -> int:
        _check_mu(mu)
        return self.count

    def conditional_variance(self, mu: float) -> float:
        return 0.0


def _check_mu(mu: float) -> None:
    if not mu > 0:
        raise ValueError("mu must be positive")


def law_from_name(name: str, m_max: int | None = None):
    if name == "poisson":
        return PoissonLaw()
    if name == "binomial":
        if m_max is None:
            raise ValueError("binomial law requires m_max")
        return BinomialLaw(m_max=m_max)
    if name == "geometric":
        return GeometricLaw()
    if name == "fixed":
        if m_max is None:
            raise ValueError("fixed law requires m_max")
        return FixedCountLaw(count=m_max)
    raise ValueError(f"unknown escalation law {name!r}")
