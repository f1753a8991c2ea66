"""Loading mass-action reaction networks from structured text (JSON).

The file lists species names, an integer initial state, and reactions as
integer stoichiometry rows with reactant orders and mass-action rate
constants.  Custom propensity forms are only available through the library
interface, not the file format.

Example::

    {
      "species": ["S", "P"],
      "initial_state": [100, 0],
      "reactions": [
        {"change": [-1, 1], "reactants": {"S": 1}, "rate": 0.05}
      ],
      "prior": {"lower": [0.005], "upper": [0.5]},
      "summary": {"species": "P", "thresholds": [10, 20, 30]}
    }

``prior`` (a box over the per-reaction rate constants) and ``summary`` are
optional and only used by the command-line front end.
"""

from __future__ import annotations

import json

from .network import KIND_MASS_ACTION, Propensity, Reaction, ReactionNetwork
from .simulate import SummarySpec

__all__ = ["NetworkFileError", "load_network", "loads_network"]


class NetworkFileError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _require(cond, where, message):
    if not cond:
        raise NetworkFileError(where, message)


def loads_network(text: str, where: str = "<string>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFileError(where, f"line {exc.lineno}: {exc.msg}") from None
    _require(isinstance(doc, dict), where, "top level must be an object")
    known = {"species", "initial_state", "reactions", "prior", "summary"}
    for key in doc:
        _require(key in known, where, f"unknown key {key!r}")
    for key in ("species", "initial_state", "reactions"):
        _require(key in doc, where, f"missing key {key!r}")

    species = doc["species"]
    _require(
        isinstance(species, list)
        and species
        and all(isinstance(s, str) for s in species),
        where,
        "'species' must be a non-empty list of names",
    )
    n = len(species)
    init = doc["initial_state"]
    _require(
        isinstance(init, list) and len(init) == n and all(isinstance(v, int) for v in init),
        where,
        f"'initial_state' must be {n} integers",
    )

    reactions = []
    rates = []
    _require(isinstance(doc["reactions"], list) and doc["reactions"], where, "'reactions' must be a non-empty list")
    for i, rx in enumerate(doc["reactions"]):
        loc = f"reactions[{i}]"
        _require(isinstance(rx, dict), where, f"{loc} must be an object")
        for key in rx:
            _require(key in {"change", "reactants", "rate"}, where, f"{loc}: unknown key {key!r}")
        for key in ("change", "reactants", "rate"):
            _require(key in rx, where, f"{loc}: missing key {key!r}")
        change = rx["change"]
        _require(
            isinstance(change, list)
            and len(change) == n
            and all(isinstance(v, int) for v in change),
            where,
            f"{loc}.change must be {n} integers",
        )
        orders = [0] * n
        _require(isinstance(rx["reactants"], dict), where, f"{loc}.reactants must be an object")
        for name, order in rx["reactants"].items():
            _require(name in species, where, f"{loc}.reactants: unknown species {name!r}")
            _require(
                isinstance(order, int) and order > 0,
                where,
                f"{loc}.reactants[{name!r}] must be a positive integer",
            )
            orders[species.index(name)] = order
        rate = rx["rate"]
        _require(
            isinstance(rate, (int, float)) and rate >= 0,
            where,
            f"{loc}.rate must be a nonnegative number",
        )
        rates.append(float(rate))
        reactions.append(
            Reaction(
                tuple(change),
                Propensity(KIND_MASS_ACTION, float(rate), orders=tuple(orders)),
            )
        )

    network = ReactionNetwork(
        species=tuple(species),
        reactions=tuple(reactions),
        initial_state=tuple(init),
    )

    prior = None
    if "prior" in doc:
        box = doc["prior"]
        _require(isinstance(box, dict), where, "'prior' must be an object")
        for key in box:
            _require(key in {"lower", "upper"}, where, f"prior: unknown key {key!r}")
        lower = box.get("lower")
        upper = box.get("upper")
        m = len(reactions)
        for name, arr in (("lower", lower), ("upper", upper)):
            _require(
                isinstance(arr, list)
                and len(arr) == m
                and all(isinstance(v, (int, float)) for v in arr),
                where,
                f"prior.{name} must be {m} numbers (one per reaction)",
            )
        _require(
            all(l < u for l, u in zip(lower, upper)),
            where,
            "prior bounds must satisfy lower < upper",
        )
        prior = ([float(v) for v in lower], [float(v) for v in upper])

    summary = None
    if "summary" in doc:
        sm = doc["summary"]
        _require(isinstance(sm, dict), where, "'summary' must be an object")
        for key in sm:
            _require(key in {"species", "thresholds"}, where, f"summary: unknown key {key!r}")
        for key in ("species", "thresholds"):
            _require(key in sm, where, f"summary: missing key {key!r}")
        _require(sm["species"] in species, where, f"summary.species {sm['species']!r} not in species")
        thr = sm["thresholds"]
        _require(
            isinstance(thr, list)
            and thr
            and all(isinstance(v, (int, float)) for v in thr)
            and list(thr) == sorted(thr),
            where,
            "summary.thresholds must be a nondecreasing list of numbers",
        )
        summary = SummarySpec.counts(species.index(sm["species"]), thr)

    return network, rates, prior, summary


def load_network(path: str):
    """Parse a network file; returns (network, rates, prior, summary)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise NetworkFileError(str(path), str(exc)) from None
    return loads_network(text, where=str(path))
