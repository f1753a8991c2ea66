"""Network file format: happy path and error reporting."""

import json

import pytest

from mfinfer.gillespie.netfile import NetworkFileError, load_network, loads_network
from mfinfer.gillespie.network import KIND_MASS_ACTION


def base_doc():
    return {
        "species": ["S", "P"],
        "initial_state": [100, 0],
        "reactions": [
            {"change": [-1, 1], "reactants": {"S": 1}, "rate": 0.05},
            {"change": [1, -1], "reactants": {"P": 1}, "rate": 0.01},
        ],
        "prior": {"lower": [0.005, 0.001], "upper": [0.5, 0.1]},
        "summary": {"species": "P", "thresholds": [10, 20, 30]},
    }


def parse(doc):
    return loads_network(json.dumps(doc))


class TestHappyPath:
    def test_full_document(self):
        network, rates, prior, summary = parse(base_doc())
        assert network.species == ("S", "P")
        assert network.initial_state == (100, 0)
        assert network.n_reactions == 2
        assert rates == [0.05, 0.01]
        d = network.reactions[0].descriptor
        assert d.kind == KIND_MASS_ACTION and d.rate == 0.05 and d.orders == (1, 0)
        assert network.reactions[1].descriptor.orders == (0, 1)
        assert prior == ([0.005, 0.001], [0.5, 0.1])
        assert summary.species == 1
        assert summary.thresholds == (10.0, 20.0, 30.0)
        assert network.all_coded()

    def test_prior_and_summary_are_optional(self):
        doc = base_doc()
        del doc["prior"], doc["summary"]
        network, rates, prior, summary = parse(doc)
        assert prior is None and summary is None
        assert network.n_species == 2

    def test_propensity_evaluates(self):
        network, _, _, _ = parse(base_doc())
        assert network.reactions[0].propensity((100, 0)) == pytest.approx(5.0)

    def test_multi_reactant_orders(self):
        doc = base_doc()
        doc["reactions"][0]["reactants"] = {"S": 2}
        network, _, _, _ = parse(doc)
        assert network.reactions[0].propensity((10, 0)) == pytest.approx(0.05 * 10 * 9)


class TestErrors:
    @pytest.mark.parametrize(
        "mutate,complaint",
        [
            (lambda d: d.update(extra=1), "unknown key 'extra'"),
            (lambda d: d.pop("species"), "missing key 'species'"),
            (lambda d: d.update(species=[]), "'species' must be a non-empty list"),
            (lambda d: d.update(initial_state=[1]), "'initial_state' must be 2 integers"),
            (lambda d: d.update(initial_state=[1.5, 0]), "'initial_state' must be 2 integers"),
            (lambda d: d.update(reactions=[]), "'reactions' must be a non-empty list"),
            (lambda d: d["reactions"][1].update(foo=1), r"reactions\[1\]: unknown key 'foo'"),
            (lambda d: d["reactions"][0].pop("rate"), r"reactions\[0\]: missing key 'rate'"),
            (lambda d: d["reactions"][0].update(change=[-1]), r"reactions\[0\].change must be 2 integers"),
            (
                lambda d: d["reactions"][0].update(reactants={"X": 1}),
                r"reactions\[0\].reactants: unknown species 'X'",
            ),
            (
                lambda d: d["reactions"][0].update(reactants={"S": 0}),
                r"reactants\['S'\] must be a positive integer",
            ),
            (lambda d: d["reactions"][0].update(rate=-1), r"reactions\[0\].rate must be a nonnegative"),
            (lambda d: d["prior"].update(mode=1), "prior: unknown key 'mode'"),
            (lambda d: d["prior"].update(lower=[0.1]), "prior.lower must be 2 numbers"),
            (
                lambda d: d["prior"].update(lower=[0.6, 0.001]),
                "prior bounds must satisfy lower < upper",
            ),
            (lambda d: d["summary"].pop("thresholds"), "summary: missing key 'thresholds'"),
            (
                lambda d: d["summary"].update(species="Q"),
                "summary.species 'Q' not in species",
            ),
            (
                lambda d: d["summary"].update(thresholds=[30, 10]),
                "summary.thresholds must be a nondecreasing list",
            ),
        ],
    )
    def test_bad_documents_name_the_problem(self, mutate, complaint):
        doc = base_doc()
        mutate(doc)
        with pytest.raises(NetworkFileError, match=complaint):
            parse(doc)

    def test_json_errors_carry_the_line(self):
        with pytest.raises(NetworkFileError, match="<string>: line 2:"):
            loads_network('{"species": ["S"],\n nope}')

    def test_top_level_must_be_object(self):
        with pytest.raises(NetworkFileError, match="top level must be an object"):
            loads_network("[1, 2]")


class TestFiles:
    def test_load_network_uses_the_path_in_errors(self, tmp_path):
        path = tmp_path / "net.json"
        path.write_text("{")
        with pytest.raises(NetworkFileError, match="net.json: line 1"):
            load_network(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(NetworkFileError, match="nowhere.json"):
            load_network(tmp_path / "nowhere.json")

    def test_round_trip_through_a_file(self, tmp_path):
        path = tmp_path / "net.json"
        path.write_text(json.dumps(base_doc()))
        network, rates, prior, summary = load_network(path)
        assert network.species == ("S", "P")
        assert rates == [0.05, 0.01]
