"""Multifidelity likelihood-free inference.

Importance sampling for simulation-based Bayesian inference in which cheap
low-fidelity simulations are stochastically escalated to expensive
high-fidelity checks, with an adaptive controller that learns where
escalation pays off, and an exact stochastic simulator whose cross-fidelity
coupling makes the corrections cheap.

Subpackage map: ``gillespie`` holds the simulator and the enzyme model,
``sampling`` the importance-sampling loops and estimators, ``schedule``
the partition trees and the adaptive controller; ``weightings``,
``perf``, ``coin``, ``models``, ``config``, and ``cli`` sit at the top
level.
"""

from ._version import __version__
from .distributions import TwoPoint, UniformBox
from .sampling.estimators import estimate_G, estimate_mse, summarize
from .sampling.mlaws import BinomialLaw, FixedCountLaw, GeometricLaw, PoissonLaw
from .sampling.runner import ConstantMean, run_mf_sampler, run_sampler
from .sampling.types import StopRule
from .schedule.adaptive import AdaptiveConfig, run_adaptive_sampler
from .schedule.tree import MeanFunction, TreeParams, parse_mean_function, render_mean_function
from .weightings import make_abc_weighting, make_bsl_weighting

__all__ = [
    "__version__",
    "AdaptiveConfig",
    "BinomialLaw",
    "ConstantMean",
    "FixedCountLaw",
    "GeometricLaw",
    "MeanFunction",
    "PoissonLaw",
    "StopRule",
    "TreeParams",
    "TwoPoint",
    "UniformBox",
    "estimate_G",
    "estimate_mse",
    "make_abc_weighting",
    "make_bsl_weighting",
    "parse_mean_function",
    "render_mean_function",
    "run_adaptive_sampler",
    "run_mf_sampler",
    "run_sampler",
    "summarize",
]
