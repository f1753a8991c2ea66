"""Closed-form cost-variance analysis and its sample-log estimators."""

import math

import numpy as np
import pytest

from mfinfer.coin import CoinModel, enumerate_hi_moments, enumerate_mf_moments
from mfinfer.perf import (
    Atom,
    DiscreteMeasure,
    PerfConstants,
    cell_sums,
    e_mf,
    e_mf_from_log,
    empirical_margin,
    existence_margin,
    j_d,
    j_d_star,
    j_hi,
    j_mf,
    log_estimates,
    mu_star,
    mu_star_fn,
    nu_star_cells,
    refinement_sums_from_log,
    v_mf_from_log,
)
from mfinfer.sampling.logio import LogRecord, sample_to_record
from mfinfer.sampling.mlaws import BinomialLaw, GeometricLaw, PoissonLaw
from mfinfer.sampling.runner import ConstantMean, run_mf_sampler, run_sampler
from mfinfer.sampling.types import StopRule


def one_atom_constants(
    *,
    delta_q=1.0,
    eta=1.0,
    b_sq=0.5,
    c_hi=1.0,
    c_lo_bar=1.0,
    v_mf=1.0,
    c_hi_bar=1.0,
    v_hi=1.0,
    cell=1,
):
    atom = Atom(
        weight=1.0,
        delta_q=delta_q,
        omega_lo=0.0,
        lam_hi=1.0,
        eta=eta,
        b_sq=b_sq,
        c_hi=c_hi,
        cell=cell,
    )
    return PerfConstants(
        measure=DiscreteMeasure((atom,)),
        c_lo_bar=c_lo_bar,
        c_hi_bar=c_hi_bar,
        v_hi=v_hi,
        v_mf=v_mf,
    )


def to_log_records(samples):
    out = []
    for s in samples:
        doc = sample_to_record(s)
        doc["theta"] = np.asarray(doc["theta"])
        out.append(LogRecord(**doc))
    return out


class TestMeasure:
    def test_weights_must_sum_to_one(self):
        a = Atom(weight=0.5, delta_q=0, omega_lo=0, lam_hi=0, eta=0, b_sq=0, c_hi=1)
        with pytest.raises(ValueError):
            DiscreteMeasure((a,))
        DiscreteMeasure((a, a))  # two halves are fine

    def test_integrate(self):
        atoms = (
            Atom(weight=0.25, delta_q=2, omega_lo=0, lam_hi=0, eta=0, b_sq=0, c_hi=1),
            Atom(weight=0.75, delta_q=4, omega_lo=0, lam_hi=0, eta=0, b_sq=0, c_hi=1),
        )
        m = DiscreteMeasure(atoms)
        assert m.integrate(lambda a: a.delta_q) == pytest.approx(3.5)


class TestClosedForms:
    def test_j_hi(self):
        c = one_atom_constants(c_hi_bar=20.0, v_hi=0.5)
        assert j_hi(c) == pytest.approx(10.0)

    def test_j_mf_one_atom_by_law(self):
        # cost = 1 + 1 = 2; unit-dispersion variance = 1 + 1 = 2;
        # e_mf = delta_q^2 b_sq = 0.5 shifts the factor by law.
        c = one_atom_constants()
        assert j_mf(c, 1.0, PoissonLaw()) == pytest.approx(4.0)
        assert j_mf(c, 1.0, BinomialLaw(m_max=1)) == pytest.approx(3.0)
        assert j_mf(c, 1.0, GeometricLaw()) == pytest.approx(5.0)
        assert j_mf(c, 1.0) == pytest.approx(4.0)  # defaults to unit dispersion

    def test_law_adjustment_is_mu_independent(self):
        c = one_atom_constants()
        for mu in (0.25, 1.0, 4.0):
            poi = j_mf(c, mu, PoissonLaw())
            cost = 1.0 + mu
            assert j_mf(c, mu, GeometricLaw()) - poi == pytest.approx(0.5 * cost)
            assert j_mf(c, mu, BinomialLaw(m_max=2)) - poi == pytest.approx(-0.25 * cost)

    def test_j_mf_rejects_nonpositive_mu(self):
        c = one_atom_constants()
        with pytest.raises(ValueError):
            j_mf(c, 0.0)
        with pytest.raises(ValueError):
            j_mf(c, lambda a: -1.0)

    def test_mu_star_hand_values(self):
        c = one_atom_constants()
        assert mu_star(c, Atom(1.0, 1.0, 0, 1, 0.0, 0, 1.0)) == 0.0  # eta = 0
        assert mu_star(c, Atom(1.0, 1.0, 0, 1, 1.0, 0, 1.0)) == pytest.approx(1.0)
        assert mu_star(
            c, Atom(1.0, 2.0, 0, 1, 1.0, 0, 4.0)
        ) == pytest.approx(1.0)  # sqrt((4 * 1 / 1) / (4 / 1))

    def test_mu_star_needs_positive_floor(self):
        c = one_atom_constants(v_mf=0.0)
        with pytest.raises(ValueError):
            mu_star(c, c.measure.atoms[0])

    def test_mu_star_fn_clamps(self):
        c = one_atom_constants()
        fn = mu_star_fn(c, mu_min=0.5, mu_max=0.75)
        assert fn(Atom(1.0, 1.0, 0, 1, 0.0, 0, 1.0)) == 0.5
        assert fn(Atom(1.0, 10.0, 0, 1, 1.0, 0, 1.0)) == 0.75

    def test_existence_margin_hand_value(self):
        c = one_atom_constants(
            delta_q=1.0, eta=0.25, c_hi=1.0, c_lo_bar=1.0, c_hi_bar=4.0, v_hi=1.0, v_mf=0.25
        )
        beats, lhs = existence_margin(c)
        assert lhs == pytest.approx(0.5)  # 0.25 head + 0.25 tail
        assert beats

    def test_existence_margin_can_fail(self):
        c = one_atom_constants(
            delta_q=1.0, eta=0.25, c_hi=1.0, c_lo_bar=1.0, c_hi_bar=4.0, v_hi=1.0, v_mf=4.0
        )
        beats, lhs = existence_margin(c)
        assert lhs == pytest.approx(1.25)
        assert not beats


class TestSchedules:
    def two_cell_constants(self):
        atoms = (
            Atom(weight=0.5, delta_q=1.0, omega_lo=0, lam_hi=1, eta=1.0, b_sq=0, c_hi=2.0, cell=1),
            Atom(weight=0.5, delta_q=2.0, omega_lo=0, lam_hi=1, eta=0.5, b_sq=0, c_hi=4.0, cell=2),
        )
        return PerfConstants(
            measure=DiscreteMeasure(atoms), c_lo_bar=1.0, c_hi_bar=3.0, v_hi=1.0, v_mf=0.25
        )

    def test_cell_sums(self):
        c_k, v_k = cell_sums(self.two_cell_constants())
        assert c_k == pytest.approx([1.0, 2.0])
        assert v_k == pytest.approx([0.5, 1.0])

    def test_j_d_hand_value(self):
        c = one_atom_constants()
        assert j_d(c, [1.0]) == pytest.approx(4.0)

    def test_j_d_at_optimum_equals_j_d_star(self):
        c = self.two_cell_constants()
        star = nu_star_cells(c)
        assert j_d(c, star) == pytest.approx(j_d_star(c), rel=1e-12)

    def test_j_d_star_is_the_minimum(self):
        c = self.two_cell_constants()
        best = j_d_star(c)
        rng = np.random.default_rng(7)
        for _ in range(100):
            nu = np.exp(rng.normal(0, 1, size=2))
            assert j_d(c, nu) >= best - 1e-12

    def test_nu_star_cells_hand_value(self):
        c = self.two_cell_constants()
        star = nu_star_cells(c)
        # sqrt((v_k / v_mf) / (c_k / c_lo_bar))
        assert star == pytest.approx([math.sqrt(2.0), math.sqrt(2.0)])

    def test_finer_partitions_do_better(self):
        # Splitting the two atoms into their own cells can only lower the
        # optimal product compared to lumping them into one.
        atoms_one = tuple(
            Atom(
                weight=a.weight,
                delta_q=a.delta_q,
                omega_lo=a.omega_lo,
                lam_hi=a.lam_hi,
                eta=a.eta,
                b_sq=a.b_sq,
                c_hi=a.c_hi,
                cell=1,
            )
            for a in self.two_cell_constants().measure.atoms
        )
        lumped = PerfConstants(
            measure=DiscreteMeasure(atoms_one), c_lo_bar=1.0, c_hi_bar=3.0, v_hi=1.0, v_mf=0.25
        )
        assert j_d_star(self.two_cell_constants()) <= j_d_star(lumped) + 1e-12


class TestCoinOracle:
    def test_frozen_constants(self):
        model = CoinModel()
        assert model.z() == pytest.approx(0.5)
        assert model.g_bar() == pytest.approx(0.625)
        c = model.constants()
        assert c.c_lo_bar == 1.0 and c.c_hi_bar == 20.0
        assert c.v_hi == pytest.approx(0.0234375)
        assert c.v_mf == pytest.approx(0.0234375)
        assert j_hi(c) == pytest.approx(0.46875)
        assert e_mf(c) == pytest.approx(0.0078125)
        beats, lhs = existence_margin(c)
        assert beats
        assert lhs == pytest.approx(0.3869061139355242, rel=1e-12)

    def test_frozen_j_values_at_unit_mean(self):
        c = CoinModel().constants()
        assert j_mf(c, 1.0, PoissonLaw()) == pytest.approx(0.65625)
        assert j_mf(c, 1.0, BinomialLaw(m_max=10)) == pytest.approx(0.63984375)
        assert j_mf(c, 1.0, GeometricLaw()) == pytest.approx(0.8203125)

    def test_hi_enumeration(self):
        model = CoinModel()
        mom = enumerate_hi_moments(model)
        assert mom["z"] == pytest.approx(0.5)
        assert mom["g_bar"] == pytest.approx(0.625)
        assert mom["j"] == pytest.approx(0.46875)

    @pytest.mark.parametrize("law", [PoissonLaw(), BinomialLaw(m_max=10), GeometricLaw()])
    @pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
    def test_closed_form_matches_enumeration(self, law, mu):
        model = CoinModel()
        c = model.constants()
        mom = enumerate_mf_moments(model, mu, law, tail=1e-14)
        assert mom["z"] == pytest.approx(0.5, abs=1e-10)
        assert mom["g_bar"] == pytest.approx(0.625, abs=1e-9)
        assert j_mf(c, mu, law) == pytest.approx(mom["j"], rel=1e-8)

    def test_closed_form_matches_enumeration_pointwise_mu(self):
        model = CoinModel()
        c = model.constants()
        fn = mu_star_fn(c, mu_min=0.05, mu_max=10.0)
        mom = enumerate_mf_moments(model, fn, PoissonLaw(), tail=1e-14)
        assert j_mf(c, fn, PoissonLaw()) == pytest.approx(mom["j"], rel=1e-8)

    def test_pointwise_optimum_beats_unit_mean_and_hi(self):
        model = CoinModel()
        c = model.constants()
        fn = mu_star_fn(c, mu_min=1e-9)
        j_opt = j_mf(c, fn, PoissonLaw())
        assert j_opt < j_mf(c, 1.0, PoissonLaw())
        assert j_opt < j_hi(c)
        # The improvement condition squared ties the two products together
        # (up to the tiny clamp keeping the zero-refinement atoms positive).
        _, lhs = existence_margin(c)
        assert j_opt == pytest.approx(lhs**2 * j_hi(c), rel=1e-6)


@pytest.fixture(scope="module")
def coin_logs():
    model = CoinModel()
    prior = model.prior()
    omega = model.weighting()
    mf = run_mf_sampler(
        prior,
        prior,
        model,
        omega,
        omega,
        model.g_fn,
        mean_fn=ConstantMean(1.0),
        m_law=PoissonLaw(),
        stop=StopRule(max_iterations=4000),
        seed=17,
        slim=True,
    )
    hi = run_sampler(
        prior,
        prior,
        model.simulate_hi,
        omega,
        model.g_fn,
        stop=StopRule(max_iterations=4000),
        seed=117,
    )
    return to_log_records(mf.samples), to_log_records(hi.samples)


class TestLogEstimators:
    def test_log_estimates_against_enumeration(self, coin_logs):
        mf_records, _ = coin_logs
        est = log_estimates(mf_records)
        mom = enumerate_mf_moments(CoinModel(), 1.0, PoissonLaw())
        assert est["n"] == 4000
        assert abs(est["g_hat"] - 0.625) < 0.02
        # Self-normalised product vs the unnormalised enumeration over z^2.
        assert est["j_hat"] == pytest.approx(mom["j"] / mom["z"] ** 2, rel=0.15)
        assert est["total_cost"] == pytest.approx(
            sum(r.total_cost for r in mf_records)
        )
        assert est["mse_hat"] * est["n"] == pytest.approx(
            est["j_hat"] / (est["total_cost"] / est["n"]), rel=1e-12
        )

    def test_log_estimates_validation(self):
        with pytest.raises(ValueError):
            log_estimates([])

    def test_v_mf_from_log(self, coin_logs):
        mf_records, _ = coin_logs
        assert v_mf_from_log(mf_records) == pytest.approx(0.0234375, rel=0.2)

    def test_refinement_sums_from_log(self, coin_logs):
        mf_records, _ = coin_logs
        c_1, v_1 = refinement_sums_from_log(mf_records)
        assert c_1 == pytest.approx(20.0, rel=0.05)
        assert v_1 == pytest.approx(0.0078125, rel=0.25)

    def test_e_mf_from_log(self, coin_logs):
        mf_records, _ = coin_logs
        assert e_mf_from_log(mf_records) == pytest.approx(0.0078125, rel=0.3)

    def test_e_mf_from_log_needs_escalation_means(self, coin_logs):
        _, hi_records = coin_logs
        with pytest.raises(ValueError):
            e_mf_from_log(hi_records)

    def test_empirical_margin(self, coin_logs):
        mf_records, hi_records = coin_logs
        beats, lhs = empirical_margin(mf_records, hi_records)
        assert beats
        # Single-cell margin: (sqrt(c_lo v_mf) + sqrt(c_1 v_1)) / sqrt(c_hi v_hi).
        expected = (
            math.sqrt(0.0234375) + math.sqrt(20.0 * 0.0078125)
        ) / math.sqrt(20.0 * 0.0234375)
        assert lhs == pytest.approx(expected, rel=0.15)

    def test_empirical_margin_validation(self, coin_logs):
        mf_records, hi_records = coin_logs
        with pytest.raises(ValueError):
            empirical_margin([], hi_records)
        with pytest.raises(ValueError):
            empirical_margin(mf_records, [])
