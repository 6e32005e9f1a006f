"""Builder-side tests: construction rules and deterministic emission.

These run without the backend; the cross-component contract lives in
test_backend_contract.py.
"""

import json

import pytest

from snnbuilder import (
    AllToAll,
    BackendNotFound,
    BuildError,
    FixedProbability,
    Network,
    OneToOne,
)


def test_single_source_three_cells_all_to_all():
    net = Network()
    stim = net.population(1, "spike_source", {"schedule": [10.0, 15.0, 20.0]})
    cells = net.population(3, "izhikevich")
    net.project(stim, cells, AllToAll(), weight=6.0, delay=1)
    doc = net.to_document()
    assert len(doc["neurons"]) == 4
    assert len(doc["synapses"]) == 3
    assert {s["post"] for s in doc["synapses"]} == {1, 2, 3}


def test_empty_projection_list_is_valid():
    net = Network()
    net.population(2, "lif")
    doc = net.to_document()
    assert doc["synapses"] == []
    assert doc["version"] == "v1"


def test_one_to_one_requires_equal_sizes():
    net = Network()
    a = net.population(3, "lif")
    b = net.population(4, "lif")
    with pytest.raises(BuildError):
        net.project(a, b, OneToOne(), weight=1.0)


def test_fixed_probability_deterministic():
    def build(seed):
        net = Network()
        a = net.population(6, "spike_source", {"rate": 20.0})
        b = net.population(6, "lif")
        net.project(a, b, FixedProbability(0.4, seed=seed), weight=1.0)
        return net.to_document()["synapses"]

    assert build(5) == build(5)
    assert build(5) != build(6)


def test_duplicate_synapse_rejected():
    net = Network()
    a = net.population(2, "spike_source", {"rate": 10.0})
    b = net.population(2, "lif")
    net.project(a, b, AllToAll(), weight=1.0)
    net.project(a, b, OneToOne(), weight=2.0)
    with pytest.raises(BuildError):
        net.to_document()


def test_self_loops_need_flag():
    net = Network()
    pop = net.population(2, "lif")
    with pytest.raises(BuildError):
        net.project(pop, pop, AllToAll(), weight=1.0)
    permissive = Network(allow_self_loops=True)
    pop = permissive.population(2, "lif")
    permissive.project(pop, pop, AllToAll(), weight=1.0)
    assert len(permissive.to_document()["synapses"]) == 4


def test_schedule_must_increase():
    net = Network()
    with pytest.raises(BuildError):
        net.population(1, "spike_source", {"schedule": [5.0, 5.0]})


def test_source_needs_exactly_one_mode():
    net = Network()
    with pytest.raises(BuildError):
        net.population(1, "spike_source", {})
    with pytest.raises(BuildError):
        net.population(1, "spike_source", {"schedule": [1.0], "rate": 10.0})


def test_delay_must_be_positive():
    net = Network()
    a = net.population(1, "spike_source", {"rate": 5.0})
    b = net.population(1, "lif")
    with pytest.raises(BuildError):
        net.project(a, b, AllToAll(), weight=1.0, delay=0)


def test_unknown_cell_type():
    net = Network()
    with pytest.raises(BuildError):
        net.population(1, "hodgkin_huxley")


def test_emitted_file_is_byte_stable(tmp_path):
    def build():
        net = Network()
        stim = net.population(1, "spike_source", {"schedule": [1.0]})
        cells = net.population(2, "izhikevich")
        net.project(stim, cells, AllToAll(), weight=3.0)
        return net

    a = build().to_network_file(tmp_path / "a.json")
    b = build().to_network_file(tmp_path / "b.json")
    assert a.read_bytes() == b.read_bytes()


def test_missing_backend_is_diagnosed(tmp_path):
    net = Network()
    net.population(1, "spike_source", {"rate": 10.0})
    with pytest.raises(BackendNotFound) as err:
        net.run(duration=10, cli="definitely-not-a-real-simulator")
    assert "PATH" in str(err.value)


def test_population_id_ranges_are_dense():
    net = Network()
    a = net.population(3, "lif")
    b = net.population(2, "lif")
    assert list(a.ids) == [0, 1, 2]
    assert list(b.ids) == [3, 4]
    doc = net.to_document()
    assert [n["id"] for n in doc["neurons"]] == [0, 1, 2, 3, 4]
