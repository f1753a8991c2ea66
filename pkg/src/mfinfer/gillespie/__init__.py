from .backend import active_backend, compiled_available
from .enzyme import (
    PRODUCT_LEVELS,
    EnzymePair,
    EnzymeParams,
    enzyme_hi,
    enzyme_lo,
    simulate_coupled_pair,
)
from .netfile import NetworkFileError, load_network, loads_network
from .network import (
    KIND_MASS_ACTION,
    KIND_SATURATING,
    Propensity,
    Reaction,
    ReactionNetwork,
)
from .paths import UnitPoissonPath
from .simulate import (
    DEFAULT_CLAMP_TIME,
    DEFAULT_EVENT_CAP,
    SummarySpec,
    TrajectorySummary,
    make_paths,
    simulate,
    simulate_direct,
)

__all__ = [
    "active_backend",
    "compiled_available",
    "PRODUCT_LEVELS",
    "EnzymePair",
    "EnzymeParams",
    "enzyme_hi",
    "enzyme_lo",
    "simulate_coupled_pair",
    "NetworkFileError",
    "load_network",
    "loads_network",
    "KIND_MASS_ACTION",
    "KIND_SATURATING",
    "Propensity",
    "Reaction",
    "ReactionNetwork",
    "UnitPoissonPath",
    "DEFAULT_CLAMP_TIME",
    "DEFAULT_EVENT_CAP",
    "SummarySpec",
    "TrajectorySummary",
    "make_paths",
    "simulate",
    "simulate_direct",
]
