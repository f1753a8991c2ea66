"""Adaptive learning of escalation rates during multifidelity sampling.

The sampler runs a burn-in phase at a constant escalation mean, fits a
partition tree to per-iteration optimal-rate targets, then follows a
stochastic gradient flow on log nu that descends the cost-variance
product J_D(nu).  All quantities entering the gradient are running Monte
Carlo averages accumulated from the sampler's own records, so the
schedule sharpens as evidence arrives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..sampling.mlaws import BinomialLaw, PoissonLaw
from ..sampling.runner import ConstantMean, mf_iteration
from ..sampling.types import SampleSet, StopRule, WeightedSample
from ..streams import StreamFactory
from .tree import (
    NU_MAX_DEFAULT,
    NU_MIN_DEFAULT,
    BurninRecord,
    MeanFunction,
    PartitionTree,
    TreeParams,
    fit_partition,
    locate_cell,
)

__all__ = [
    "AdaptiveState",
    "AdaptiveConfig",
    "AdaptiveResult",
    "burnin_records",
    "update_accumulators",
    "jd_gradient",
    "jd_value",
    "gradient_step",
    "nu_star_estimate",
    "run_adaptive_sampler",
]


@dataclass
class AdaptiveState:
    """Running averages feeding the gradient of J_D.

    All sums run over every post-activation iteration (the denominator r
    counts iterations, escalated or not); the per-cell sums only receive
    contributions when the iteration escalated into that cell.
    """

    n_cells: int
    r: int = 0
    c_lo_sum: float = 0.0
    v_mf_sum: float = 0.0
    c_k_sum: np.ndarray = field(default=None)
    v_k_sum: np.ndarray = field(default=None)
    w_sum: float = 0.0
    wg_sum: float = 0.0

    def __post_init__(self):
        if self.c_k_sum is None:
            self.c_k_sum = np.zeros(self.n_cells, dtype=np.float64)
        if self.v_k_sum is None:
            self.v_k_sum = np.zeros(self.n_cells, dtype=np.float64)

    @property
    def g_hat(self) -> float:
        """Running self-normalised estimate of the quantity of interest."""
        if self.w_sum == 0.0:
            return 0.0
        return self.wg_sum / self.w_sum

    @property
    def c_lo_bar(self) -> float:
        return self.c_lo_sum / self.r if self.r else 0.0

    @property
    def v_mf(self) -> float:
        return self.v_mf_sum / self.r if self.r else 0.0

    @property
    def c_k(self) -> np.ndarray:
        return self.c_k_sum / self.r if self.r else self.c_k_sum.copy()

    @property
    def v_k(self) -> np.ndarray:
        return self.v_k_sum / self.r if self.r else self.v_k_sum.copy()


def update_accumulators(state: AdaptiveState, sample: WeightedSample) -> AdaptiveState:
    """Fold one multifidelity sample into the running averages.

    The centring constant is the running estimate including this sample,
    so early updates use rough centres that are never revised; the
    averages still converge as the run lengthens.
    """
    record = sample.record
    if record is None:
        raise ValueError("accumulator updates need the multifidelity record")
    state.r += 1
    state.c_lo_sum += record.cost_lo
    state.w_sum += sample.weight
    state.wg_sum += sample.weight * sample.g_value
    delta = (sample.g_value - state.g_hat) * sample.draw.density_ratio
    if record.m >= 1:
        if sample.cell is None:
            raise ValueError("escalated samples need a cell label")
        k = sample.cell - 1
        mu = record.mu
        omega_lo = record.omega_lo
        omega_hi = record.omega_hi_list
        state.c_k_sum[k] += record.cost_hi_total / mu
        state.v_k_sum[k] += sum((delta * (w - omega_lo)) ** 2 for w in omega_hi) / mu
        s1 = math.fsum(omega_hi)
        s2 = math.fsum(w * w for w in omega_hi)
        state.v_mf_sum += (delta / mu) ** 2 * (s1 * s1 - s2)
    return state


def jd_value(nu, c_k, v_k, c_lo_bar: float, v_mf: float) -> float:
    """Cost-variance product of a piecewise-constant schedule."""
    nu = np.asarray(nu, dtype=np.float64)
    cost = c_lo_bar + float(np.dot(np.asarray(c_k, dtype=np.float64), nu))
    var = v_mf + float(np.sum(np.asarray(v_k, dtype=np.float64) / nu))
    return cost * var


def jd_gradient(nu, c_k, v_k, c_lo_bar: float, v_mf: float) -> np.ndarray:
    """Gradient of J_D with respect to log nu, evaluated componentwise."""
    nu = np.asarray(nu, dtype=np.float64)
    c_k = np.asarray(c_k, dtype=np.float64)
    v_k = np.asarray(v_k, dtype=np.float64)
    var_term = v_mf + float(np.sum(v_k / nu))
    cost_term = c_lo_bar + float(np.dot(c_k, nu))
    return nu * c_k * var_term - (v_k / nu) * cost_term


def gradient_step(
    nu,
    c_k,
    v_k,
    c_lo_bar: float,
    v_mf: float,
    delta: float,
    nu_min: float = NU_MIN_DEFAULT,
    nu_max: float = NU_MAX_DEFAULT,
) -> tuple[np.ndarray, bool]:
    """One descent step on log nu; returns (new nu, whether it applied).

    A non-finite gradient (possible when the weighted sums overflow)
    leaves nu untouched and reports the skip.
    """
    nu = np.asarray(nu, dtype=np.float64)
    grad = jd_gradient(nu, c_k, v_k, c_lo_bar, v_mf)
    if not np.all(np.isfinite(grad)):
        return nu.copy(), False
    stepped = np.exp(np.log(nu) - delta * grad)
    return np.clip(stepped, nu_min, nu_max), True


def gradient_step_state(
    state: AdaptiveState,
    nu,
    delta: float,
    nu_min: float = NU_MIN_DEFAULT,
    nu_max: float = NU_MAX_DEFAULT,
) -> tuple[np.ndarray, bool]:
    return gradient_step(nu, state.c_k, state.v_k, state.c_lo_bar, state.v_mf, delta, nu_min, nu_max)


def nu_star_estimate(
    state: AdaptiveState,
    nu_min: float = NU_MIN_DEFAULT,
    nu_max: float = NU_MAX_DEFAULT,
) -> np.ndarray | None:
    """Closed-form optimum of J_D under the current running averages.

    Returns None when the variance floor estimate is not yet positive.
    Cells with no observed refinement variance pin to nu_min; cells with
    no observed escalation cost pin to nu_max.
    """
    v_mf = state.v_mf
    if not (v_mf > 0.0):
        return None
    c_lo_bar = state.c_lo_bar
    c_k = state.c_k
    v_k = state.v_k
    out = np.empty(state.n_cells, dtype=np.float64)
    for k in range(state.n_cells):
        if v_k[k] <= 0.0:
            out[k] = nu_min
        elif c_k[k] <= 0.0:
            out[k] = nu_max
        else:
            out[k] = math.sqrt((v_k[k] / v_mf) / (c_k[k] / c_lo_bar))
    return np.clip(out, nu_min, nu_max)


def burnin_records(samples: list[WeightedSample]) -> list[BurninRecord]:
    """Regression material for the partition fit.

    The target is the per-iteration optimal escalation mean: |Delta_i|
    scaled by the square root of refinement variance over escalation
    cost, both observed on that iteration.  Iterations that never
    escalated carry no signal and are marked with m = 0.
    """
    w_sum = math.fsum(s.weight for s in samples)
    if w_sum != 0.0:
        g_hat = math.fsum(s.weight * s.g_value for s in samples) / w_sum
    else:
        g_hat = 0.0
    out = []
    for s in samples:
        record = s.record
        if record is None or s.features is None:
            raise ValueError("burn-in records need multifidelity samples with features")
        delta_abs = abs((s.g_value - g_hat) * s.draw.density_ratio)
        if record.m >= 1 and record.cost_hi_total > 0.0:
            refine = math.fsum((w - record.omega_lo) ** 2 for w in record.omega_hi_list)
            target = delta_abs * math.sqrt(refine / record.cost_hi_total)
        else:
            target = 0.0
        out.append(
            BurninRecord(
                features=np.asarray(s.features, dtype=np.float64),
                m=record.m,
                target=target,
                delta_abs=delta_abs,
            )
        )
    return out


@dataclass(frozen=True)
class AdaptiveConfig:
    """Hyperparameters of the adaptive run."""

    n0: int = 10_000
    delta: float = 1e3
    tree_params: TreeParams = TreeParams()
    burnin_mu: float = 1.0
    nu_min: float = NU_MIN_DEFAULT
    nu_max: float = NU_MAX_DEFAULT
    trace_every: int = 1
    update_every: int = 1

    def __post_init__(self):
        if self.n0 < 1:
            raise ValueError("burn-in length must be positive")
        if not (self.delta > 0):
            raise ValueError("step size must be positive")
        if not (0 < self.nu_min <= self.nu_max):
            raise ValueError("invalid clamp bounds")
        if self.trace_every < 1 or self.update_every < 1:
            raise ValueError("trace_every and update_every must be positive")


@dataclass
class AdaptiveResult:
    samples: SampleSet
    mean_fn: object
    tree: PartitionTree | None
    state: AdaptiveState | None
    nu_trace: list[tuple[int, np.ndarray]]
    skipped_updates: int
    total_cost: float


class _BurninMean(ConstantMean):
    """Constant burn-in mean that still requests feature vectors.

    The partition fit at the end of burn-in regresses on them, so they
    must be collected even though the constant mean ignores them.
    """

    uses_features = True


def run_adaptive_sampler(
    prior,
    proposal,
    pair,
    weighting_lo,
    weighting_hi,
    g_fn,
    *,
    config: AdaptiveConfig = AdaptiveConfig(),
    m_law=None,
    stop: StopRule | None = None,
    seed: int = 0,
    replicates: int = 1,
    feature_names: tuple[str, ...] | None = None,
    slim: bool = False,
    sink=None,
) -> AdaptiveResult:
    """Multifidelity sampling with a schedule learned on the fly.

    Burn-in runs at a constant escalation mean; once n0 iterations have
    accrued the partition is fitted to the burn-in targets, the burn-in
    is replayed through the accumulators to seed the running averages,
    and every later iteration both updates the averages and moves nu one
    gradient step.
    """
    if m_law is None:
        m_law = PoissonLaw()
    nu_max = config.nu_max
    if isinstance(m_law, BinomialLaw):
        nu_max = min(nu_max, float(m_law.m_max))
        if config.burnin_mu > m_law.m_max:
            raise ValueError("burn-in mean exceeds the escalation cap")
    if stop is None:
        stop = StopRule(max_iterations=2 * config.n0)
    done = stop.done if isinstance(stop, StopRule) else stop

    factory = StreamFactory(seed)
    mean_fn: object = _BurninMean(config.burnin_mu)
    samples: list[WeightedSample] = []
    nu_trace: list[tuple[int, np.ndarray]] = []
    tree: PartitionTree | None = None
    state: AdaptiveState | None = None
    skipped = 0
    total_cost = 0.0
    i = 0
    while not done(i, total_cost):
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
            i,
            slim=slim,
        )
        samples.append(sample)
        total_cost += sample.total_cost
        if sink is not None:
            sink(sample)
        if tree is None:
            if i >= config.n0:
                records = burnin_records(samples)
                tree = fit_partition(records, config.tree_params, feature_names)
                nu = np.ones(tree.n_cells, dtype=np.float64)
                mean_fn = MeanFunction(tree, nu, config.nu_min, nu_max)
                state = AdaptiveState(tree.n_cells)
                for s in samples:
                    s.cell = locate_cell(tree, s.features)
                    update_accumulators(state, s)
                nu_trace.append((i, nu.copy()))
        else:
            update_accumulators(state, sample)
            # The schedule stays frozen inside an update batch; batches of
            # size 1 step on every iteration.
            if (i - config.n0) % config.update_every == 0:
                new_nu, ok = gradient_step_state(
                    state, mean_fn.nu, config.delta, config.nu_min, nu_max
                )
                if not ok:
                    skipped += 1
                mean_fn.nu = new_nu
            if i % config.trace_every == 0:
                nu_trace.append((i, mean_fn.nu.copy()))

    return AdaptiveResult(
        samples=SampleSet(samples=samples, seed=seed, kind="multifidelity"),
        mean_fn=mean_fn,
        tree=tree,
        state=state,
        nu_trace=nu_trace,
        skipped_updates=skipped,
        total_cost=total_cost,
    )
