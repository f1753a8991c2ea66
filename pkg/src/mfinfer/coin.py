"""A two-level Bernoulli model whose multifidelity behaviour is enumerable.

The parameter is a coin bias p on two prior atoms.  Both fidelities
threshold one shared uniform draw u: high fidelity reports u < p, low
fidelity reports u < p + shift, so the low-fidelity answer is cheap,
biased upward, and strongly coupled to the high-fidelity one.  The
weighting is the indicator of matching the observed outcome, and the
quantity of interest is p itself.

Because everything is piecewise constant in u, the proposal law over
(p, u) reduces to six atoms and every sampler moment has a closed form,
which makes this model the reference oracle for the cost-variance
formulas and for the adaptive schedule: expectations can be enumerated
to machine precision and compared against both the analytic expressions
and long sampler runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import TwoPoint
from .perf import Atom, DiscreteMeasure, PerfConstants
from .sampling.mlaws import BinomialLaw, FixedCountLaw, GeometricLaw, PoissonLaw
from .sampling.types import SimulationOutput

__all__ = ["CoinModel", "enumerate_mf_moments", "enumerate_hi_moments"]

# Both outcomes as shared read-only summaries; avoids per-call allocation.
_Y_ONE = np.array([1.0])
_Y_ONE.setflags(write=False)
_Y_ZERO = np.array([0.0])
_Y_ZERO.setflags(write=False)


@dataclass(frozen=True)
class CoinModel:
    p_values: tuple[float, float] = (0.25, 0.75)
    shift: float = 0.1
    c_lo: float = 1.0
    c_hi: float = 20.0
    y0: float = 1.0

    def __post_init__(self):
        for p in self.p_values:
            if not (0.0 < p and p + self.shift < 1.0):
                raise ValueError("biases and shift must keep both thresholds inside (0, 1)")

    # Sampler-facing interface -------------------------------------------

    def prior(self) -> TwoPoint:
        return TwoPoint(self.p_values)

    def g_fn(self, theta) -> float:
        return float(theta[0])

    def weighting(self):
        """Indicator of matching the observed outcome, averaged over a batch."""
        y0 = self.y0

        def omega(theta, y_batch) -> float:
            hits = 0
            for y in y_batch:
                if float(y[0]) == y0:
                    hits += 1
            return hits / len(y_batch)

        return omega

    def simulate_lo(self, theta, streams) -> tuple[SimulationOutput, float]:
        p = float(theta[0])
        u = float(streams.stream().random())
        y = _Y_ONE if u < p + self.shift else _Y_ZERO
        return SimulationOutput(y=y, cost=self.c_lo), u

    def simulate_hi_coupled(self, theta, u: float, streams) -> SimulationOutput:
        p = float(theta[0])
        y = _Y_ONE if u < p else _Y_ZERO
        return SimulationOutput(y=y, cost=self.c_hi)

    def simulate_hi(self, theta, streams) -> SimulationOutput:
        u = float(streams.stream().random())
        return self.simulate_hi_coupled(theta, u, streams)

    # Exact enumeration ---------------------------------------------------

    def g_bar(self) -> float:
        """Posterior mean of p under the high-fidelity weighting."""
        num = math.fsum(0.5 * p * p for p in self.p_values)
        den = math.fsum(0.5 * p for p in self.p_values)
        return num / den

    def z(self) -> float:
        """Mean weight of the high-fidelity sampler (prior proposal)."""
        return math.fsum(0.5 * p for p in self.p_values)

    def atoms(self, cell_fn=None) -> tuple[Atom, ...]:
        """The six (p, u-region) atoms of the proposal law.

        Regions are u < p (both fidelities hit), p <= u < p + shift
        (only low fidelity hits), and the rest (both miss).  cell_fn maps
        (p, y_lo) to a 1-based cell label for partition enumerations.
        """
        g_bar = self.g_bar()
        out = []
        for p in self.p_values:
            regions = (
                (p, 1.0, 1.0),
                (self.shift, 1.0, 0.0),
                (1.0 - p - self.shift, 0.0, 0.0),
            )
            for length, y_lo, y_hi in regions:
                omega_lo = 1.0 if y_lo == self.y0 else 0.0
                omega_hi = 1.0 if y_hi == self.y0 else 0.0
                cell = cell_fn(p, y_lo) if cell_fn is not None else 1
                out.append(
                    Atom(
                        weight=0.5 * length,
                        delta_q=p - g_bar,
                        omega_lo=omega_lo,
                        lam_hi=omega_hi,
                        eta=(omega_hi - omega_lo) ** 2,
                        b_sq=(omega_hi - omega_lo) ** 2,
                        c_hi=self.c_hi,
                        cell=cell,
                    )
                )
        return tuple(out)

    def constants(self, cell_fn=None) -> PerfConstants:
        atoms = self.atoms(cell_fn)
        g_bar = self.g_bar()
        v_hi = math.fsum(0.5 * (p - g_bar) ** 2 * p for p in self.p_values)
        v_mf = math.fsum(a.weight * a.delta_q**2 * a.lam_hi**2 for a in atoms)
        return PerfConstants(
            measure=DiscreteMeasure(atoms),
            c_lo_bar=self.c_lo,
            c_hi_bar=self.c_hi,
            v_hi=v_hi,
            v_mf=v_mf,
            z=self.z(),
        )

    def constants_for_tree(self, tree) -> PerfConstants:
        """Constants with atom cells labelled by a fitted partition.

        The partition features are (p, low-fidelity outcome), matching
        what the adaptive sampler feeds its tree for this model.
        """
        from .schedule.tree import locate_cell

        def cell_fn(p, y_lo):
            return locate_cell(tree, np.array([p, y_lo]))

        return self.constants(cell_fn)


def _pmf_items(law, mu: float, tail: float):
    """Yield (m, probability) pairs covering all but tail mass."""
    if isinstance(law, FixedCountLaw):
        yield law.count, 1.0
        return
    if isinstance(law, BinomialLaw):
        n = law.m_max
        q = mu / n
        prob = (1.0 - q) ** n
        cum = 0.0
        for m in range(n + 1):
            yield m, prob
            cum += prob
            if m < n:
                prob *= (n - m) / (m + 1) * q / (1.0 - q)
        return
    if isinstance(law, GeometricLaw):
        r = 1.0 / (1.0 + mu)
        prob = r
        cum = 0.0
        m = 0
        while cum < 1.0 - tail:
            yield m, prob
            cum += prob
            prob *= 1.0 - r
            m += 1
        return
    if isinstance(law, PoissonLaw):
        prob = math.exp(-mu)
        cum = 0.0
        m = 0
        while cum < 1.0 - tail:
            yield m, prob
            cum += prob
            prob *= mu / (m + 1)
            m += 1
        return
    raise TypeError(f"cannot enumerate law {law!r}")


def enumerate_mf_moments(model: CoinModel, mu, law=None, tail: float = 1e-12) -> dict:
    """Exact sampler moments under the corrected weighting.

    mu is a constant or a callable over atoms.  Sums run over the six
    atoms and the escalation counts of the law until the remaining count
    mass is below tail.  Returns the mean weight, the estimate it
    normalises to, the expected iteration cost, the unnormalised
    variance about the true high-fidelity value, and their product.
    """
    if law is None:
        law = PoissonLaw()
    g_bar = model.g_bar()
    w_sum = 0.0
    wg_sum = 0.0
    cost = 0.0
    var = 0.0
    for a in model.atoms():
        p = a.delta_q + g_bar  # the prior-proposal ratio is 1 and G is p itself
        m_val = float(mu(a)) if callable(mu) else float(mu)
        for m, prob in _pmf_items(law, m_val, tail):
            mass = a.weight * prob
            omega = a.omega_lo + m * (a.lam_hi - a.omega_lo) / m_val
            w_sum += mass * omega
            wg_sum += mass * omega * p
            cost += mass * (model.c_lo + m * model.c_hi)
            var += mass * (a.delta_q * omega) ** 2
    return {
        "z": w_sum,
        "g_bar": wg_sum / w_sum,
        "cost": cost,
        "var": var,
        "j": cost * var,
    }


def enumerate_hi_moments(model: CoinModel) -> dict:
    """Exact moments of the plain high-fidelity sampler."""
    g_bar = model.g_bar()
    z = model.z()
    var = math.fsum(0.5 * (p - g_bar) ** 2 * p for p in model.p_values)
    return {
        "z": z,
        "g_bar": g_bar,
        "cost": model.c_hi,
        "var": var,
        "j": model.c_hi * var,
    }
