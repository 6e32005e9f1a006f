"""Placement tests. The optimum oracle enumerates all injective placements of
small instances (e.g. 9*8*7 = 504 for three clusters on a 3x3 mesh)."""

import itertools

import pytest

from neurosim import (
    HardwareConfig,
    InvalidPlacement,
    Placement,
    PsoParams,
    SnnNetwork,
    SpikeTrace,
    Synapse,
    hop_cost,
    identity_placement,
    place_pso,
    to_mapping_matrix,
    validate_mapping_matrix,
)
from neurosim.network import Lif
from neurosim.partition import ClusteredSnn, partition_greedy
from neurosim.placement import cluster_traffic
from neurosim.synth import random_net, random_trace


def three_cluster_chain():
    """Clusters A, B, C (ids 0, 1, 2) with edges B->A and A->C."""
    neurons = [Lif() for _ in range(3)]
    synapses = [Synapse(1, 0, 1.0), Synapse(0, 2, 1.0)]
    net = SnnNetwork(neurons=neurons, synapses=synapses)
    clustering = ClusteredSnn(
        cluster_of=[0, 1, 2], clusters=[[0], [1], [2]], capacity=1, global_spike_cost=0
    )
    trace = SpikeTrace(
        spikes=[[0, 1, 2], [0, 1], [5]],
        weights={(1, 0): 1.0, (0, 2): 1.0},
        duration=10,
    )
    return net, clustering, trace


def enumerate_best(clustering, trace, mesh_w, mesh_h):
    coords = [(x, y) for y in range(mesh_h) for x in range(mesh_w)]
    best = None
    for combo in itertools.permutations(coords, clustering.n_clusters):
        placement = Placement(crossbar_of=list(combo), mesh_w=mesh_w, mesh_h=mesh_h)
        cost, _segments = hop_cost(placement, clustering, trace)
        if best is None or cost < best:
            best = cost
    return best


def test_route_segments_match_reference_layouts():
    _net, clustering, trace = three_cluster_chain()
    # A at (1,1), B at (0,0), C at (2,2): two 2-hop legs chain to 4 segments
    spread = Placement(crossbar_of=[(1, 1), (0, 0), (2, 2)], mesh_w=3, mesh_h=3)
    _cost, segments = hop_cost(spread, clustering, trace)
    assert segments == 4
    # A at (0,1), B at (0,0), C at (0,2): adjacent column placement, 2 segments
    packed = Placement(crossbar_of=[(0, 1), (0, 0), (0, 2)], mesh_w=3, mesh_h=3)
    _cost, segments = hop_cost(packed, clustering, trace)
    assert segments == 2


def test_hop_cost_weights_by_spikes():
    _net, clustering, trace = three_cluster_chain()
    placement = Placement(crossbar_of=[(1, 1), (0, 0), (2, 2)], mesh_w=3, mesh_h=3)
    cost, _ = hop_cost(placement, clustering, trace)
    # B->A carries 2 spikes over 2 hops, A->C carries 3 spikes over 2 hops
    assert cost == 2 * 2 + 3 * 2


def test_duplicate_crossbar_rejected():
    _net, clustering, trace = three_cluster_chain()
    shared = Placement(crossbar_of=[(0, 0), (0, 0), (1, 1)], mesh_w=3, mesh_h=3)
    with pytest.raises(InvalidPlacement):
        hop_cost(shared, clustering, trace)


def test_mapping_matrix_single_cluster():
    clustering = ClusteredSnn(cluster_of=[0, 0], clusters=[[0, 1]], capacity=2,
                              global_spike_cost=0)
    placement = Placement(crossbar_of=[(0, 0)], mesh_w=2, mesh_h=2)
    matrix = to_mapping_matrix(clustering, placement)
    assert matrix.tolist() == [[1, 0, 0, 0], [1, 0, 0, 0]]
    validate_mapping_matrix(matrix, clustering)


def test_mapping_matrix_structure():
    _net, clustering, trace = three_cluster_chain()
    placement = Placement(crossbar_of=[(1, 1), (0, 0), (2, 2)], mesh_w=3, mesh_h=3)
    matrix = to_mapping_matrix(clustering, placement)
    assert matrix.shape == (3, 9)
    assert (matrix.sum(axis=1) == 1).all()
    # composition: neuron -> cluster -> crossbar equals the matrix support
    for neuron, cluster in enumerate(clustering.cluster_of):
        assert matrix[neuron, placement.linear(cluster)] == 1
    # unused crossbars stay all-zero columns
    assert matrix.sum() == 3


def test_hop_cost_permutation_equivariant():
    _net, clustering, trace = three_cluster_chain()
    placement = Placement(crossbar_of=[(1, 1), (0, 0), (2, 2)], mesh_w=3, mesh_h=3)
    base_cost, _ = hop_cost(placement, clustering, trace)
    # relabel clusters 0,1,2 -> 2,0,1 consistently everywhere
    relabel = {0: 2, 1: 0, 2: 1}
    clustering2 = ClusteredSnn(
        cluster_of=[relabel[c] for c in clustering.cluster_of],
        clusters=[[1], [2], [0]],
        capacity=1,
        global_spike_cost=0,
    )
    coords2 = [None] * 3
    for old, new in relabel.items():
        coords2[new] = placement.crossbar_of[old]
    placement2 = Placement(crossbar_of=coords2, mesh_w=3, mesh_h=3)
    cost2, _ = hop_cost(placement2, clustering2, trace)
    assert cost2 == base_cost


def test_pso_reaches_enumeration_optimum_on_chain():
    _net, clustering, trace = three_cluster_chain()
    hw = HardwareConfig(mesh_w=3, mesh_h=3, crossbar_capacity=1)
    optimum = enumerate_best(clustering, trace, 3, 3)
    placement = place_pso(clustering, hw, trace, PsoParams(20, 100), seed=0)
    cost, _ = hop_cost(placement, clustering, trace)
    assert cost == optimum


def test_single_cluster_costs_nothing():
    clustering = ClusteredSnn(cluster_of=[0, 0], clusters=[[0, 1]], capacity=2,
                              global_spike_cost=0)
    trace = SpikeTrace(spikes=[[1], [2]], weights={(0, 1): 1.0}, duration=5)
    hw = HardwareConfig(mesh_w=2, mesh_h=2, crossbar_capacity=2)
    placement = place_pso(clustering, hw, trace, PsoParams(5, 5), seed=0)
    cost, segments = hop_cost(placement, clustering, trace)
    assert cost == 0 and segments == 0


def test_pso_never_worse_than_identity():
    for seed in range(10):
        net = random_net(12, edge_prob=0.3, seed=seed, max_indegree=2)
        trace = random_trace(net, duration=40, mean_spikes=5.0, seed=seed)
        clustering = partition_greedy(net, trace, capacity=4)
        hw = HardwareConfig(mesh_w=4, mesh_h=4, crossbar_capacity=4)
        identity = identity_placement(clustering, hw)
        id_cost, _ = hop_cost(identity, clustering, trace)
        best = place_pso(clustering, hw, trace, PsoParams(15, 40), seed=seed)
        pso_cost, _ = hop_cost(best, clustering, trace)
        assert pso_cost <= id_cost


def test_pso_gbest_non_increasing():
    _net, clustering, trace = three_cluster_chain()
    hw = HardwareConfig(mesh_w=3, mesh_h=3, crossbar_capacity=1)
    history: list[float] = []
    place_pso(clustering, hw, trace, PsoParams(10, 30), seed=1, history=history)
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_equal_weight_clique_prefers_adjacency():
    """All-pairs equal traffic: the enumerated optimum matches a tight
    L-shaped triple (total pairwise distance 4 on a 3x3 mesh)."""
    neurons = [Lif() for _ in range(3)]
    synapses = [
        Synapse(a, b, 1.0) for a in range(3) for b in range(3) if a != b
    ]
    net = SnnNetwork(neurons=neurons, synapses=synapses)
    clustering = ClusteredSnn(cluster_of=[0, 1, 2], clusters=[[0], [1], [2]], capacity=1,
                              global_spike_cost=0)
    trace = SpikeTrace(
        spikes=[[0], [1], [2]],
        weights={(s.pre, s.post): 1.0 for s in synapses},
        duration=5,
    )
    optimum = enumerate_best(clustering, trace, 3, 3)
    tight = Placement(crossbar_of=[(0, 0), (1, 0), (0, 1)], mesh_w=3, mesh_h=3)
    tight_cost, _ = hop_cost(tight, clustering, trace)
    assert optimum == tight_cost


def test_traffic_collapses_multicast():
    # one source spiking twice into two neurons of one remote cluster: the
    # packet count is 2 (per spike), not 4 (per synapse)
    clustering = ClusteredSnn(cluster_of=[0, 1, 1], clusters=[[0], [1, 2]], capacity=2,
                              global_spike_cost=0)
    trace = SpikeTrace(spikes=[[0, 3], [], []], weights={(0, 1): 1.0, (0, 2): 1.0},
                       duration=5)
    traffic = cluster_traffic(clustering, trace)
    assert traffic == {(0, 1): 2}


def test_refinement_mode_returns_valid_placement():
    _net, clustering, trace = three_cluster_chain()
    hw = HardwareConfig(mesh_w=3, mesh_h=3, crossbar_capacity=1, cycles_per_timestep=4)
    placement = place_pso(
        clustering, hw, trace, PsoParams(8, 20), seed=3, refine=True, refine_every=5
    )
    placement.validate()
    cost, _ = hop_cost(placement, clustering, trace)
    identity = identity_placement(clustering, hw)
    id_cost, _ = hop_cost(identity, clustering, trace)
    assert cost <= id_cost * 2  # refined choice stays sane
