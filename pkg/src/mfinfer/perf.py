"""Closed-form cost-variance analysis for multifidelity weightings.

The asymptotic inefficiency of a sampler is the product of expected
per-iteration cost and per-iteration variance; this module evaluates
that product exactly over a discrete measure of atoms (points of the
proposal law over parameters and shared simulator randomness, each
carrying conditional moments of the weightings) and estimates the same
quantities from sample logs.

Conventions: all variances here are unnormalised second moments of
w (G - G_bar); self-normalised estimators divide by the squared mean
weight, so comparisons against sample-based estimates must divide these
values by z**2 with z the mean weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sampling.mlaws import BinomialLaw, GeometricLaw, PoissonLaw

__all__ = [
    "Atom",
    "DiscreteMeasure",
    "PerfConstants",
    "j_hi",
    "j_mf",
    "mu_star",
    "mu_star_fn",
    "existence_margin",
    "e_mf",
    "cell_sums",
    "j_d",
    "j_d_star",
    "nu_star_cells",
    "log_estimates",
    "v_mf_from_log",
    "refinement_sums_from_log",
    "e_mf_from_log",
    "empirical_margin",
]


@dataclass(frozen=True)
class Atom:
    """One atom of the proposal law over (parameters, shared randomness).

    delta_q is (G - G_bar) * prior / proposal at the atom; lam_hi and
    eta are the conditional mean of the high-fidelity weighting and the
    conditional second moment of the refinement (omega_hi - omega_lo);
    b_sq is the squared conditional mean refinement; c_hi is the
    expected cost of one escalation check.
    """

    weight: float
    delta_q: float
    omega_lo: float
    lam_hi: float
    eta: float
    b_sq: float
    c_hi: float
    cell: int = 1


@dataclass(frozen=True)
class DiscreteMeasure:
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        total = math.fsum(a.weight for a in self.atoms)
        if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-9):
            raise ValueError(f"atom weights sum to {total}, expected 1")

    def integrate(self, f) -> float:
        return math.fsum(a.weight * f(a) for a in self.atoms)


@dataclass(frozen=True)
class PerfConstants:
    """Everything the closed forms need.

    c_hi_bar and v_hi describe the uncoupled high-fidelity sampler (its
    expected iteration cost and unnormalised variance); v_mf is the
    variance floor of the corrected sampler; z is the mean weight.
    e_mf, the weighted squared mean refinement entering the non-unit
    dispersion law adjustments, defaults to its integral over the atoms.
    """

    measure: DiscreteMeasure
    c_lo_bar: float
    c_hi_bar: float
    v_hi: float
    v_mf: float
    z: float = 1.0
    e_mf: float | None = None


def j_hi(constants: PerfConstants) -> float:
    """Cost-variance product of the plain high-fidelity sampler."""
    return constants.c_hi_bar * constants.v_hi


def _mu_at(mu, atom: Atom) -> float:
    value = float(mu(atom)) if callable(mu) else float(mu)
    if not (value > 0.0):
        raise ValueError("escalation means must be positive")
    return value


def _law_adjustment(law, e_mf: float) -> float:
    """Variance-factor shift of a count law relative to unit dispersion.

    The exact integrand is delta_q**2 * b_sq * (Var(M)/mu**2 - 1/mu),
    which is identically zero for mean-mu counts of unit dispersion and
    independent of mu for the two supported alternatives, so it
    collapses to a multiple of e_mf.
    """
    if isinstance(law, PoissonLaw):
        return 0.0
    if isinstance(law, BinomialLaw):
        return -e_mf / law.m_max
    if isinstance(law, GeometricLaw):
        return e_mf
    raise TypeError(f"no closed-form variance shift for {law!r}")


def j_mf(constants: PerfConstants, mu, law=None) -> float:
    """Cost-variance product of the corrected sampler.

    mu is a constant or a callable over atoms.  The escalation-count law
    enters only through a mu-independent shift of the variance factor.
    """
    if law is None:
        law = PoissonLaw()
    measure = constants.measure
    cost = constants.c_lo_bar + measure.integrate(lambda a: _mu_at(mu, a) * a.c_hi)
    e_mf_value = constants.e_mf if constants.e_mf is not None else e_mf(constants)
    var = (
        constants.v_mf
        + measure.integrate(lambda a: a.delta_q**2 * a.eta / _mu_at(mu, a))
        + _law_adjustment(law, e_mf_value)
    )
    return cost * var


def mu_star(constants: PerfConstants, atom: Atom) -> float:
    """Optimal escalation mean at one atom (unit-dispersion counts)."""
    if not (constants.v_mf > 0.0):
        raise ValueError("variance floor must be positive")
    num = atom.delta_q**2 * atom.eta / constants.v_mf
    den = atom.c_hi / constants.c_lo_bar
    if den <= 0.0:
        raise ValueError("escalation cost must be positive")
    return math.sqrt(num / den)


def mu_star_fn(constants: PerfConstants, mu_min: float = 0.0, mu_max: float = math.inf):
    """The optimal mean as a callable over atoms, optionally clamped."""

    def fn(atom: Atom) -> float:
        return min(max(mu_star(constants, atom), mu_min), mu_max)

    return fn


def e_mf(constants: PerfConstants) -> float:
    """Weighted mean-refinement term entering the law adjustments."""
    return constants.measure.integrate(lambda a: a.delta_q**2 * a.b_sq)


def existence_margin(constants: PerfConstants) -> tuple[bool, float]:
    """Whether the optimal corrected sampler beats plain high fidelity.

    Returns (beats, lhs) where lhs < 1 is the strict improvement
    condition: sqrt((c_lo_bar/c_hi_bar)(v_mf/v_hi)) plus the integral of
    sqrt(delta_q**2 * eta / v_hi) * sqrt(c_hi / c_hi_bar).
    """
    head = math.sqrt((constants.c_lo_bar / constants.c_hi_bar) * (constants.v_mf / constants.v_hi))
    tail = constants.measure.integrate(
        lambda a: math.sqrt(a.delta_q**2 * a.eta / constants.v_hi)
        * math.sqrt(a.c_hi / constants.c_hi_bar)
    )
    lhs = head + tail
    return lhs < 1.0, lhs


def cell_sums(constants: PerfConstants, n_cells: int | None = None):
    """Per-cell escalation cost and refinement variance integrals."""
    atoms = constants.measure.atoms
    if n_cells is None:
        n_cells = max(a.cell for a in atoms)
    c_k = np.zeros(n_cells, dtype=np.float64)
    v_k = np.zeros(n_cells, dtype=np.float64)
    for a in atoms:
        c_k[a.cell - 1] += a.weight * a.c_hi
        v_k[a.cell - 1] += a.weight * a.delta_q**2 * a.eta
    return c_k, v_k


def j_d(constants: PerfConstants, nu) -> float:
    """Cost-variance product of a piecewise-constant schedule."""
    nu = np.asarray(nu, dtype=np.float64)
    c_k, v_k = cell_sums(constants, n_cells=nu.shape[0])
    cost = constants.c_lo_bar + float(np.dot(c_k, nu))
    var = constants.v_mf + float(np.sum(v_k / nu))
    return cost * var


def nu_star_cells(constants: PerfConstants, n_cells: int | None = None) -> np.ndarray:
    """Optimal piecewise-constant rates over the atom cell labels."""
    c_k, v_k = cell_sums(constants, n_cells)
    if not (constants.v_mf > 0.0):
        raise ValueError("variance floor must be positive")
    return np.sqrt((v_k / constants.v_mf) / (c_k / constants.c_lo_bar))


def j_d_star(constants: PerfConstants, n_cells: int | None = None) -> float:
    """Minimum of j_d over positive rates for the given partition."""
    c_k, v_k = cell_sums(constants, n_cells)
    head = math.sqrt(constants.c_lo_bar * constants.v_mf)
    return (head + math.fsum(math.sqrt(c * v) for c, v in zip(c_k, v_k))) ** 2


def _g_hat(records) -> float:
    w_sum = math.fsum(r.w for r in records)
    if w_sum == 0.0:
        return 0.0
    return math.fsum(r.w * r.g for r in records) / w_sum


def log_estimates(records) -> dict:
    """Point estimates from a sample log: g_hat, mse_hat, j_hat, cost."""
    if not records:
        raise ValueError("empty log")
    n = len(records)
    g_hat = _g_hat(records)
    w = np.array([r.w for r in records], dtype=np.float64)
    g = np.array([r.g for r in records], dtype=np.float64)
    costs = np.array([r.total_cost for r in records], dtype=np.float64)
    mean_w = float(w.mean())
    if mean_w == 0.0:
        raise ValueError("all weights are zero")
    num = float(np.mean(w**2 * (g - g_hat) ** 2))
    return {
        "n": n,
        "g_hat": g_hat,
        "mse_hat": num / mean_w**2 / n,
        "j_hat": float(costs.mean()) * num / mean_w**2,
        "total_cost": float(costs.sum()),
    }


def _delta(record, g_hat: float, ratio: float) -> float:
    return (record.g - g_hat) * ratio


def v_mf_from_log(records, g_hat: float | None = None, ratio_fn=None) -> float:
    """Plug-in variance floor from a corrected-sampler log.

    Uses the pairwise product identity ((sum w)**2 - sum w**2) / mu**2,
    which is unbiased for the squared conditional mean under mean-mu
    unit-dispersion escalation counts.  ratio_fn maps theta to the
    prior/proposal density ratio; omitted means the proposal is the
    prior.
    """
    if g_hat is None:
        g_hat = _g_hat(records)
    total = 0.0
    for r in records:
        ratio = 1.0 if ratio_fn is None else ratio_fn(r.theta)
        if r.m >= 1:
            s1 = math.fsum(r.omega_hi_list)
            s2 = math.fsum(w * w for w in r.omega_hi_list)
            total += (_delta(r, g_hat, ratio) / r.mu) ** 2 * (s1 * s1 - s2)
    return total / len(records)


def refinement_sums_from_log(records, g_hat: float | None = None, ratio_fn=None):
    """Plug-in single-cell escalation cost and refinement variance."""
    if g_hat is None:
        g_hat = _g_hat(records)
    c_total = 0.0
    v_total = 0.0
    for r in records:
        if r.m >= 1:
            ratio = 1.0 if ratio_fn is None else ratio_fn(r.theta)
            d = _delta(r, g_hat, ratio)
            c_total += r.cost_hi_total / r.mu
            v_total += math.fsum((d * (w - r.omega_lo)) ** 2 for w in r.omega_hi_list) / r.mu
    n = len(records)
    return c_total / n, v_total / n


def e_mf_from_log(records, g_hat: float | None = None, ratio_fn=None) -> float:
    """Plug-in weighted mean-refinement term from a corrected log.

    Every record contributes: with no escalations the inner estimate
    reduces to omega_lo**2, and dropping those terms would bias the
    average.  Records from plain single-fidelity runs (no escalation
    mean) are rejected.
    """
    if g_hat is None:
        g_hat = _g_hat(records)
    total = 0.0
    for r in records:
        if r.mu is None:
            raise ValueError("record without an escalation mean")
        ratio = 1.0 if ratio_fn is None else ratio_fn(r.theta)
        d2 = _delta(r, g_hat, ratio) ** 2
        s1 = math.fsum(r.omega_hi_list)
        s2 = math.fsum(w * w for w in r.omega_hi_list)
        pair = (s1 * s1 - s2) / r.mu**2
        total += d2 * (pair - 2.0 * r.omega_lo * s1 / r.mu + r.omega_lo**2)
    return total / len(records)


def empirical_margin(mf_records, hi_records, ratio_fn=None) -> tuple[bool, float]:
    """Plug-in improvement condition from a corrected log and a plain
    high-fidelity baseline log, treating the whole space as one cell.

    The single-cell refinement sum upper-bounds the pointwise-optimal
    integral, so a value below 1 is a conservative go signal.
    """
    if not mf_records or not hi_records:
        raise ValueError("both logs must be nonempty")
    g_mf = _g_hat(mf_records)
    c_lo_bar = math.fsum(r.cost_lo for r in mf_records) / len(mf_records)
    v_mf = v_mf_from_log(mf_records, g_mf, ratio_fn)
    c_1, v_1 = refinement_sums_from_log(mf_records, g_mf, ratio_fn)

    g_hi = _g_hat(hi_records)
    c_hi_bar = math.fsum(r.total_cost for r in hi_records) / len(hi_records)
    v_hi = math.fsum((r.w * (r.g - g_hi)) ** 2 for r in hi_records) / len(hi_records)
    if not (v_hi > 0.0 and c_hi_bar > 0.0):
        raise ValueError("degenerate baseline log")
    lhs = (math.sqrt(c_lo_bar * v_mf) + math.sqrt(c_1 * v_1)) / math.sqrt(c_hi_bar * v_hi)
    return lhs < 1.0, lhs
