"""Run configuration: strict JSON with experiment defaults.

A configuration file is one JSON object with schema_version 1 and up to
four sections: model, weighting, sampler, and cost_unit.  Unknown keys
anywhere are errors, and every complaint names the offending field path.
Defaults follow the enzyme-kinetics experiments: a strict distance
cutoff of 5 with one replicate for the indicator weighting, 100
replicates for the synthetic-likelihood weighting, and burn-in lengths
and step sizes matched to each weighting's scale.

The configuration hash is the sha256 of the canonical (sorted-key,
compact) JSON dump of the fully resolved configuration, so logs written
under equal effective settings carry equal hashes even when their files
spelt defaults differently.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .schedule.tree import TreeParams

__all__ = [
    "ConfigError",
    "ModelConfig",
    "WeightingConfig",
    "AdaptiveSection",
    "SamplerConfig",
    "RunConfig",
    "loads_config",
    "load_config",
    "config_hash",
]

SCHEMA_VERSION = 1

MODEL_NAMES = ("enzyme", "coin", "network")
WEIGHTING_KINDS = ("abc", "bsl", "pseudo-marginal")
SAMPLER_KINDS = ("single", "multifidelity", "adaptive")
# Short spellings accepted in config files: plain importance sampling,
# multifidelity with a frozen escalation rate, and the adaptive sampler.
SAMPLER_KIND_ALIASES = {"is": "single", "mf-fixed": "multifidelity", "mf-adaptive": "adaptive"}
M_LAWS = ("poisson", "binomial", "geometric", "fixed")
COST_UNITS = ("events", "wallclock")


class ConfigError(ValueError):
    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


class _Section:
    """Pop-and-check helper that rejects unknown keys."""

    def __init__(self, data, where: str):
        if not isinstance(data, dict):
            raise ConfigError(where, "expected an object")
        self.data = dict(data)
        self.where = where

    def child(self, key: str) -> str:
        return f"{self.where}.{key}"

    def take(self, key: str, kinds, default):
        if key not in self.data:
            return default
        value = self.data.pop(key)
        if kinds is bool:
            if not isinstance(value, bool):
                raise ConfigError(self.child(key), "expected true or false")
            return value
        if kinds is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(self.child(key), "expected a number")
            return float(value)
        if kinds is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(self.child(key), "expected an integer")
            return int(value)
        if kinds is str:
            if not isinstance(value, str):
                raise ConfigError(self.child(key), "expected a string")
            return value
        if kinds is dict:
            if not isinstance(value, dict):
                raise ConfigError(self.child(key), "expected an object")
            return value
        if kinds is list:
            if not isinstance(value, list):
                raise ConfigError(self.child(key), "expected an array")
            return value
        raise AssertionError(kinds)

    def take_choice(self, key: str, choices, default):
        value = self.take(key, str, default)
        if value not in choices:
            raise ConfigError(self.child(key), f"expected one of {', '.join(choices)}")
        return value

    def finish(self):
        if self.data:
            key = sorted(self.data)[0]
            raise ConfigError(self.child(key), "unknown key")


@dataclass(frozen=True)
class ModelConfig:
    name: str
    s0: int = 100
    e0: int = 5
    path: str | None = None
    y0: tuple[float, ...] | None = None
    g_index: int = 0


@dataclass(frozen=True)
class WeightingConfig:
    kind: str
    epsilon: float
    replicates: int
    covariance_jitter: float = 0.0


@dataclass(frozen=True)
class AdaptiveSection:
    n0: int
    delta: float
    nu_min: float = 1e-3
    nu_max: float = 1e3
    tree: TreeParams = TreeParams()
    trace_every: int = 100
    update_every: int = 1


@dataclass(frozen=True)
class SamplerConfig:
    kind: str
    fidelity: str = "hi"
    n: int = 10_000
    max_cost: float | None = None
    seed: int = 0
    m_law: str = "poisson"
    m_max: int = 10
    mu: float = 1.0
    mean_function: str | None = None
    adaptive: AdaptiveSection | None = None


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig
    weighting: WeightingConfig
    sampler: SamplerConfig
    cost_unit: str = "events"

    def to_dict(self) -> dict:
        tree = self.sampler.adaptive.tree if self.sampler.adaptive else None
        return {
            "schema_version": SCHEMA_VERSION,
            "model": {
                "name": self.model.name,
                "s0": self.model.s0,
                "e0": self.model.e0,
                "path": self.model.path,
                "y0": list(self.model.y0) if self.model.y0 is not None else None,
                "g_index": self.model.g_index,
            },
            "weighting": {
                "kind": self.weighting.kind,
                "epsilon": self.weighting.epsilon,
                "replicates": self.weighting.replicates,
                "covariance_jitter": self.weighting.covariance_jitter,
            },
            "sampler": {
                "kind": self.sampler.kind,
                "fidelity": self.sampler.fidelity,
                "n": self.sampler.n,
                "max_cost": self.sampler.max_cost,
                "seed": self.sampler.seed,
                "m_law": self.sampler.m_law,
                "m_max": self.sampler.m_max,
                "mu": self.sampler.mu,
                "mean_function": self.sampler.mean_function,
                "adaptive": None
                if self.sampler.adaptive is None
                else {
                    "n0": self.sampler.adaptive.n0,
                    "delta": self.sampler.adaptive.delta,
                    "nu_min": self.sampler.adaptive.nu_min,
                    "nu_max": self.sampler.adaptive.nu_max,
                    "tree": {
                        "max_depth": tree.max_depth,
                        "min_leaf": tree.min_leaf,
                        "max_leaves": tree.max_leaves,
                    },
                    "trace_every": self.sampler.adaptive.trace_every,
                    "update_every": self.sampler.adaptive.update_every,
                },
            },
            "cost_unit": self.cost_unit,
        }

    @property
    def hash(self) -> str:
        return config_hash(self.to_dict())


def config_hash(resolved: dict) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _parse_model(data, where: str) -> ModelConfig:
    sec = _Section(data, where)
    name = sec.take_choice("name", MODEL_NAMES, None)
    if name is None:
        raise ConfigError(sec.child("name"), "required")
    s0 = sec.take("s0", int, 100)
    e0 = sec.take("e0", int, 5)
    path = sec.take("path", str, None)
    g_index = sec.take("g_index", int, 0)
    y0_raw = sec.take("y0", list, None)
    sec.finish()
    y0 = None
    if y0_raw is not None:
        try:
            y0 = tuple(float(v) for v in y0_raw)
        except (TypeError, ValueError):
            raise ConfigError(f"{where}.y0", "expected an array of numbers") from None
    if name == "network" and path is None:
        raise ConfigError(f"{where}.path", "required for network models")
    if name != "network" and path is not None:
        raise ConfigError(f"{where}.path", "only network models take a file")
    if s0 < 1 or e0 < 1:
        raise ConfigError(where, "initial counts must be positive")
    if g_index < 0:
        raise ConfigError(f"{where}.g_index", "must be nonnegative")
    return ModelConfig(name=name, s0=s0, e0=e0, path=path, y0=y0, g_index=g_index)


def _parse_weighting(data, where: str, model: str) -> WeightingConfig:
    sec = _Section(data, where)
    kind = sec.take_choice("kind", WEIGHTING_KINDS, "abc")
    default_eps = 0.5 if model == "coin" else 5.0
    epsilon = sec.take("epsilon", float, default_eps)
    replicates = sec.take("replicates", int, 100 if kind == "bsl" else 1)
    jitter = sec.take("covariance_jitter", float, 0.0)
    sec.finish()
    if not epsilon > 0:
        raise ConfigError(f"{where}.epsilon", "must be positive")
    if replicates < 1:
        raise ConfigError(f"{where}.replicates", "must be positive")
    if kind == "bsl" and replicates < 2:
        raise ConfigError(f"{where}.replicates", "synthetic likelihood needs at least 2")
    if jitter < 0:
        raise ConfigError(f"{where}.covariance_jitter", "must be nonnegative")
    return WeightingConfig(kind=kind, epsilon=epsilon, replicates=replicates, covariance_jitter=jitter)


def _parse_tree(data, where: str) -> TreeParams:
    sec = _Section(data, where)
    max_depth = sec.take("max_depth", int, 7)
    min_leaf = sec.take("min_leaf", int, 100)
    max_leaves = sec.take("max_leaves", int, 16)
    sec.finish()
    try:
        return TreeParams(max_depth=max_depth, min_leaf=min_leaf, max_leaves=max_leaves)
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def _parse_adaptive(data, where: str, weighting_kind: str) -> AdaptiveSection:
    sec = _Section(data, where)
    n0 = sec.take("n0", int, 2_000 if weighting_kind == "bsl" else 10_000)
    delta = sec.take("delta", float, 1e8 if weighting_kind == "bsl" else 1e3)
    nu_min = sec.take("nu_min", float, 1e-3)
    nu_max = sec.take("nu_max", float, 1e3)
    tree = _parse_tree(sec.take("tree", dict, {}), sec.child("tree"))
    trace_every = sec.take("trace_every", int, 100)
    update_every = sec.take("update_every", int, 1)
    sec.finish()
    if n0 < 1:
        raise ConfigError(f"{where}.n0", "must be positive")
    if not delta > 0:
        raise ConfigError(f"{where}.delta", "must be positive")
    if not (0 < nu_min <= nu_max):
        raise ConfigError(where, "need 0 < nu_min <= nu_max")
    if trace_every < 1:
        raise ConfigError(f"{where}.trace_every", "must be positive")
    if update_every < 1:
        raise ConfigError(f"{where}.update_every", "must be positive")
    return AdaptiveSection(
        n0=n0,
        delta=delta,
        nu_min=nu_min,
        nu_max=nu_max,
        tree=tree,
        trace_every=trace_every,
        update_every=update_every,
    )


def _parse_sampler(data, where: str, weighting_kind: str) -> SamplerConfig:
    sec = _Section(data, where)
    kind = sec.take_choice("kind", SAMPLER_KINDS + tuple(SAMPLER_KIND_ALIASES), "single")
    kind = SAMPLER_KIND_ALIASES.get(kind, kind)
    fidelity = sec.take_choice("fidelity", ("hi", "lo"), "hi")
    n = sec.take("n", int, 10_000)
    max_cost = sec.take("max_cost", float, None)
    seed = sec.take("seed", int, 0)
    m_law = sec.take_choice("m_law", M_LAWS, "poisson")
    m_max = sec.take("m_max", int, 10)
    mu = sec.take("mu", float, 1.0)
    mean_function = sec.take("mean_function", str, None)
    adaptive_raw = sec.take("adaptive", dict, None)
    sec.finish()
    if n < 1:
        raise ConfigError(f"{where}.n", "must be positive")
    if max_cost is not None and not max_cost > 0:
        raise ConfigError(f"{where}.max_cost", "must be positive")
    if m_max < 1:
        raise ConfigError(f"{where}.m_max", "must be positive")
    if not mu > 0:
        raise ConfigError(f"{where}.mu", "must be positive")
    if mean_function is not None and kind != "multifidelity":
        raise ConfigError(f"{where}.mean_function", "only frozen multifidelity runs take a file")
    adaptive = None
    if kind == "adaptive":
        adaptive = _parse_adaptive(adaptive_raw or {}, sec.child("adaptive"), weighting_kind)
    elif adaptive_raw is not None:
        raise ConfigError(sec.child("adaptive"), "only adaptive samplers take this section")
    return SamplerConfig(
        kind=kind,
        fidelity=fidelity,
        n=n,
        max_cost=max_cost,
        seed=seed,
        m_law=m_law,
        m_max=m_max,
        mu=mu,
        mean_function=mean_function,
        adaptive=adaptive,
    )


def loads_config(text: str, where: str = "config") -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(where, f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    sec = _Section(data, where)
    version = sec.take("schema_version", int, None)
    if version != SCHEMA_VERSION:
        raise ConfigError(sec.child("schema_version"), f"expected {SCHEMA_VERSION}")
    model_raw = sec.take("model", dict, None)
    if model_raw is None:
        raise ConfigError(sec.child("model"), "required")
    model = _parse_model(model_raw, sec.child("model"))
    weighting = _parse_weighting(sec.take("weighting", dict, {}), sec.child("weighting"), model.name)
    sampler = _parse_sampler(sec.take("sampler", dict, {}), sec.child("sampler"), weighting.kind)
    cost_unit = sec.take_choice("cost_unit", COST_UNITS, "events")
    sec.finish()
    if model.name == "network" and sampler.kind in ("multifidelity", "adaptive"):
        raise ConfigError(f"{where}.sampler.kind", "network models run single fidelity only")
    return RunConfig(model=model, weighting=weighting, sampler=sampler, cost_unit=cost_unit)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_config(fh.read(), where=str(path))
