"""Adaptive schedule: accumulators, gradient flow, end-to-end runs."""

import math

import numpy as np
import pytest

from mfinfer.coin import CoinModel
from mfinfer.sampling.mlaws import BinomialLaw, PoissonLaw
from mfinfer.sampling.runner import ConstantMean, run_mf_sampler
from mfinfer.sampling.types import (
    MultifidelityRecord,
    ParameterDraw,
    SimulationOutput,
    StopRule,
    WeightedSample,
)
from mfinfer.schedule.adaptive import (
    AdaptiveConfig,
    AdaptiveState,
    burnin_records,
    gradient_step,
    jd_gradient,
    jd_value,
    nu_star_estimate,
    run_adaptive_sampler,
    update_accumulators,
)
from mfinfer.schedule.tree import MeanFunction, TreeParams


def mf_sample(
    *,
    weight,
    g_value,
    cost_lo=1.0,
    omega_lo=0.0,
    mu=1.0,
    hi=(),
    cell=1,
    index=0,
):
    """Hand-built multifidelity sample; hi is a list of (omega_hi, batch_cost)."""
    draw = ParameterDraw(theta=np.zeros(1), prior_density=1.0, proposal_density=1.0)
    record = MultifidelityRecord(
        y_lo_batch=[SimulationOutput(y=np.zeros(1), cost=cost_lo)],
        omega_lo=omega_lo,
        mu=mu,
        m=len(hi),
        hi_batches=[
            ([SimulationOutput(y=np.zeros(1), cost=c)], w) for w, c in hi
        ],
    )
    return WeightedSample(
        index=index,
        draw=draw,
        weight=weight,
        g_value=g_value,
        total_cost=record.total_cost,
        omega=omega_lo,
        record=record,
        features=np.zeros(1),
        cell=cell,
    )


class TestAccumulators:
    def test_escalated_sample_hand_values(self):
        # weight 0 keeps the running centre at 0, so delta = g = 1.
        s = mf_sample(
            weight=0.0,
            g_value=1.0,
            cost_lo=2.0,
            omega_lo=0.0,
            mu=1.0,
            hi=[(1.0, 3.0), (1.0, 4.0)],
        )
        state = update_accumulators(AdaptiveState(1), s)
        assert state.r == 1
        assert state.c_lo_bar == pytest.approx(2.0)
        assert state.c_k[0] == pytest.approx(7.0)  # (3 + 4) / mu
        assert state.v_k[0] == pytest.approx(2.0)  # two unit refinements
        assert state.v_mf == pytest.approx(2.0)  # s1^2 - s2 = 4 - 2

    def test_mu_scaling(self):
        s = mf_sample(
            weight=0.0,
            g_value=1.0,
            mu=2.0,
            hi=[(1.0, 3.0), (1.0, 4.0)],
        )
        state = update_accumulators(AdaptiveState(1), s)
        assert state.c_k[0] == pytest.approx(3.5)
        assert state.v_k[0] == pytest.approx(1.0)
        assert state.v_mf == pytest.approx(0.5)  # (1/2)^2 * (4 - 2)

    def test_unescalated_samples_touch_low_side_only(self):
        state = AdaptiveState(2)
        update_accumulators(state, mf_sample(weight=1.0, g_value=0.0, cost_lo=2.0))
        update_accumulators(state, mf_sample(weight=1.0, g_value=0.0, cost_lo=4.0))
        assert state.r == 2
        assert state.c_lo_bar == pytest.approx(3.0)
        assert np.all(state.c_k == 0.0)
        assert np.all(state.v_k == 0.0)
        assert state.v_mf == 0.0

    def test_running_centre_includes_current_sample(self):
        state = AdaptiveState(1)
        # After folding in the first sample the centre equals its own g,
        # so its refinement contribution vanishes.
        update_accumulators(
            state, mf_sample(weight=1.0, g_value=2.0, omega_lo=0.0, hi=[(1.0, 1.0)])
        )
        assert state.v_k[0] == pytest.approx(0.0)
        # Second sample: centre moves to (2 + 0) / 2 = 1, delta = -1.
        update_accumulators(
            state, mf_sample(weight=1.0, g_value=0.0, omega_lo=0.0, hi=[(1.0, 1.0)])
        )
        assert state.g_hat == pytest.approx(1.0)
        assert state.v_k_sum[0] == pytest.approx(1.0)
        assert state.v_k[0] == pytest.approx(0.5)

    def test_requires_record_and_cell(self):
        draw = ParameterDraw(theta=np.zeros(1), prior_density=1.0, proposal_density=1.0)
        bare = WeightedSample(index=0, draw=draw, weight=1.0, g_value=0.0, total_cost=1.0)
        with pytest.raises(ValueError):
            update_accumulators(AdaptiveState(1), bare)
        s = mf_sample(weight=1.0, g_value=1.0, hi=[(1.0, 1.0)], cell=None)
        with pytest.raises(ValueError):
            update_accumulators(AdaptiveState(1), s)

    def test_coin_averages_match_enumeration(self):
        # Escalation at mean 1 with pairwise coupling: the refinement floor
        # estimate must approach the enumerated value 0.0234375 and the
        # per-cell escalation cost must approach c_hi.
        model = CoinModel()
        prior = model.prior()
        omega = model.weighting()
        n = 4000
        result = run_mf_sampler(
            prior,
            prior,
            model,
            omega,
            omega,
            model.g_fn,
            mean_fn=ConstantMean(1.0),
            m_law=PoissonLaw(),
            stop=StopRule(max_iterations=n),
            seed=13,
            slim=True,
        )
        state = AdaptiveState(1)
        for s in result.samples:
            update_accumulators(state, s)
        assert state.r == n
        assert state.c_lo_bar == pytest.approx(model.c_lo)
        assert abs(state.c_k[0] - model.c_hi) < 4.0 * model.c_hi / math.sqrt(n)
        assert abs(state.v_mf - 0.0234375) < 4.0 * 0.14 / math.sqrt(n)
        assert abs(state.g_hat - model.g_bar()) < 0.05


class TestGradient:
    def test_hand_value(self):
        grad = jd_gradient([1.0], [1.0], [4.0], c_lo_bar=1.0, v_mf=1.0)
        assert grad == pytest.approx([-3.0])

    def test_step_moves_in_log_space(self):
        nu, ok = gradient_step([1.0], [1.0], [4.0], 1.0, 1.0, delta=0.1)
        assert ok
        assert nu == pytest.approx([math.exp(0.3)])

    def test_jd_value_hand(self):
        assert jd_value([1.0], [1.0], [1.0], c_lo_bar=1.0, v_mf=1.0) == pytest.approx(4.0)

    def test_stationary_at_closed_form_optimum(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            k = rng.integers(1, 6)
            c_k = rng.random(k) + 0.1
            v_k = rng.random(k) + 0.1
            c_lo, v_mf = rng.random() + 0.1, rng.random() + 0.1
            nu_star = np.sqrt((v_k / v_mf) / (c_k / c_lo))
            grad = jd_gradient(nu_star, c_k, v_k, c_lo, v_mf)
            scale = jd_value(nu_star, c_k, v_k, c_lo, v_mf)
            assert np.all(np.abs(grad) < 1e-10 * scale)

    def test_optimum_is_a_minimum(self):
        rng = np.random.default_rng(6)
        c_k, v_k = np.array([0.7, 2.0]), np.array([1.3, 0.4])
        c_lo, v_mf = 0.9, 0.5
        nu_star = np.sqrt((v_k / v_mf) / (c_k / c_lo))
        base = jd_value(nu_star, c_k, v_k, c_lo, v_mf)
        for _ in range(50):
            other = nu_star * np.exp(rng.normal(0, 0.5, size=2))
            assert jd_value(other, c_k, v_k, c_lo, v_mf) >= base - 1e-12

    def test_clamps_apply(self):
        with np.errstate(over="ignore"):
            nu, ok = gradient_step(
                [1.0], [1000.0], [1e-9], 1.0, 1.0, delta=10.0, nu_min=0.5, nu_max=2.0
            )
            assert ok and nu[0] == 0.5
            nu, ok = gradient_step(
                [1.0], [1e-9], [1000.0], 1.0, 1.0, delta=10.0, nu_min=0.5, nu_max=2.0
            )
            assert ok and nu[0] == 2.0

    def test_nonfinite_gradient_skips(self):
        with np.errstate(invalid="ignore"):
            nu, ok = gradient_step([1.0], [np.inf], [1.0], 1.0, 1.0, delta=0.1)
        assert not ok
        assert nu == pytest.approx([1.0])


class TestNuStar:
    def state(self, c_lo, v_mf, c_k, v_k):
        s = AdaptiveState(len(c_k))
        s.r = 1
        s.c_lo_sum = c_lo
        s.v_mf_sum = v_mf
        s.c_k_sum = np.asarray(c_k, dtype=np.float64)
        s.v_k_sum = np.asarray(v_k, dtype=np.float64)
        return s

    def test_closed_form(self):
        s = self.state(1.0, 1.0, [1.0], [4.0])
        assert nu_star_estimate(s) == pytest.approx([2.0])

    def test_no_variance_floor_yet(self):
        s = self.state(1.0, 0.0, [1.0], [4.0])
        assert nu_star_estimate(s) is None

    def test_pinned_cells(self):
        s = self.state(1.0, 1.0, [1.0, 0.0], [0.0, 4.0])
        star = nu_star_estimate(s, nu_min=1e-3, nu_max=1e3)
        assert star[0] == 1e-3  # no refinement variance observed
        assert star[1] == 1e3  # no escalation cost observed


class TestBurninRecords:
    def test_targets(self):
        s1 = mf_sample(weight=1.0, g_value=1.0)  # m = 0
        s2 = mf_sample(
            weight=1.0, g_value=3.0, omega_lo=0.5, hi=[(1.0, 2.0)]
        )
        records = burnin_records([s1, s2])
        assert [r.m for r in records] == [0, 1]
        # g_hat = 2, so both deltas are 1.
        assert records[0].delta_abs == pytest.approx(1.0)
        assert records[0].target == 0.0
        assert records[1].target == pytest.approx(math.sqrt(0.25 / 2.0))

    def test_needs_features(self):
        s = mf_sample(weight=1.0, g_value=1.0)
        s.features = None
        with pytest.raises(ValueError):
            burnin_records([s])


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            AdaptiveConfig(n0=0)
        with pytest.raises(ValueError):
            AdaptiveConfig(delta=0.0)
        with pytest.raises(ValueError):
            AdaptiveConfig(nu_min=2.0, nu_max=1.0)
        with pytest.raises(ValueError):
            AdaptiveConfig(trace_every=0)
        with pytest.raises(ValueError):
            AdaptiveConfig(update_every=0)


def run_coin_adaptive(**overrides):
    model = CoinModel()
    prior = model.prior()
    omega = model.weighting()
    kwargs = dict(
        config=AdaptiveConfig(
            n0=300,
            delta=1e-4,
            tree_params=TreeParams(min_leaf=50, max_leaves=4),
            trace_every=1,
        ),
        stop=StopRule(max_iterations=600),
        seed=21,
        slim=True,
    )
    kwargs.update(overrides)
    return run_adaptive_sampler(
        prior, prior, model, omega, omega, model.g_fn, **kwargs
    )


class TestAdaptiveRun:
    def test_end_to_end_shape(self):
        result = run_coin_adaptive()
        assert len(result.samples.samples) == 600
        assert result.tree is not None and result.tree.n_cells >= 1
        assert isinstance(result.mean_fn, MeanFunction)
        # Every sample, burn-in included, was folded into the averages.
        assert result.state.r == 600
        assert all(s.cell is not None for s in result.samples.samples)
        # Trace starts at the activation point with the all-ones schedule.
        first_i, first_nu = result.nu_trace[0]
        assert first_i == 300
        assert first_nu == pytest.approx(np.ones(result.tree.n_cells))
        assert result.skipped_updates == 0
        assert result.total_cost == pytest.approx(
            sum(s.total_cost for s in result.samples.samples)
        )

    def test_rerun_is_deterministic(self):
        a = run_coin_adaptive()
        b = run_coin_adaptive()
        assert np.array_equal(a.mean_fn.nu, b.mean_fn.nu)
        assert [s.weight for s in a.samples.samples] == [
            s.weight for s in b.samples.samples
        ]

    def test_update_every_freezes_between_steps(self):
        result = run_coin_adaptive(
            config=AdaptiveConfig(
                n0=300,
                delta=1e-4,
                tree_params=TreeParams(min_leaf=50, max_leaves=4),
                trace_every=1,
                update_every=5,
            )
        )
        trace = dict((i, nu) for i, nu in result.nu_trace)
        changed = [
            i
            for i in range(301, 600)
            if not np.array_equal(trace[i], trace[i - 1])
        ]
        assert changed  # the schedule does move
        assert all((i - 300) % 5 == 0 for i in changed)

    def test_binomial_caps_schedule(self):
        result = run_coin_adaptive(
            m_law=BinomialLaw(m_max=2),
            config=AdaptiveConfig(
                n0=200,
                delta=10.0,  # deliberately huge steps to hit the cap
                tree_params=TreeParams(min_leaf=50, max_leaves=4),
                burnin_mu=1.0,
            ),
            stop=StopRule(max_iterations=500),
        )
        peak = max(float(np.max(nu)) for _, nu in result.nu_trace)
        assert peak <= 2.0

    def test_binomial_rejects_burnin_above_cap(self):
        with pytest.raises(ValueError):
            run_coin_adaptive(
                m_law=BinomialLaw(m_max=2),
                config=AdaptiveConfig(n0=10, burnin_mu=5.0),
            )

    def test_short_run_never_activates(self):
        result = run_coin_adaptive(stop=StopRule(max_iterations=50))
        assert result.tree is None
        assert result.state is None
        assert result.nu_trace == []
        assert isinstance(result.mean_fn, ConstantMean)

    def test_schedule_approaches_coin_optimum(self):
        # With a single forced cell the flow should settle near the
        # enumerated optimum sqrt((V_1 / V_mf) / (c_1 / c_lo_bar)); for the
        # coin V_1 = 0.0078125, V_mf = 0.0234375, c_1 = 20, c_lo_bar = 1,
        # giving sqrt(1 / 60) ~ 0.129.
        result = run_coin_adaptive(
            config=AdaptiveConfig(
                n0=400,
                delta=1e-2,
                tree_params=TreeParams(min_leaf=10_000),  # forces one cell
                trace_every=50,
            ),
            stop=StopRule(max_iterations=4000),
            seed=3,
        )
        assert result.tree.n_cells == 1
        star = nu_star_estimate(result.state)
        assert star is not None
        final = float(result.mean_fn.nu[0])
        # The state-implied optimum and the flow's resting point agree.
        assert final == pytest.approx(float(star[0]), rel=0.15)
        assert abs(final - math.sqrt(1.0 / 60.0)) < 0.05
