"""Mapping walkthrough: cut a network into crossbar-sized clusters, then
search for a placement that keeps chatty clusters close together.

Reproduces the three-cluster layout comparison: placing B, A, C in a column
uses 2 interconnect segments end to end, while spreading them diagonally
uses 4.
"""

from neurosim import (
    HardwareConfig,
    Placement,
    PsoParams,
    hop_cost,
    identity_placement,
    partition_greedy,
    place_pso,
    to_mapping_matrix,
)
from neurosim.network import SpikeTrace
from neurosim.partition import ClusteredSnn
from neurosim.synth import random_net, random_trace

print("=== 1. Two placements of the same clustered network ===")
# clusters A(id 0), B(id 1), C(id 2); spikes flow B -> A -> C
clustering = ClusteredSnn(cluster_of=[0, 1, 2], clusters=[[0], [1], [2]], capacity=1,
                          global_spike_cost=0)
trace = SpikeTrace(spikes=[[0, 1, 2], [0, 1], [5]],
                   weights={(1, 0): 1.0, (0, 2): 1.0}, duration=10)

spread = Placement(crossbar_of=[(1, 1), (0, 0), (2, 2)], mesh_w=3, mesh_h=3)
cost, segments = hop_cost(spread, clustering, trace)
print(f"A(1,1) B(0,0) C(2,2): spike-weighted hop cost {cost}, "
      f"max route segments {segments}")

packed = Placement(crossbar_of=[(0, 1), (0, 0), (0, 2)], mesh_w=3, mesh_h=3)
cost, segments = hop_cost(packed, clustering, trace)
print(f"A(0,1) B(0,0) C(0,2): spike-weighted hop cost {cost}, "
      f"max route segments {segments}")

print()
print("=== 2. Greedy partitioning of a random network ===")
net = random_net(20, edge_prob=0.3, seed=1, max_indegree=3)
trace = random_trace(net, duration=50, mean_spikes=6.0, seed=2)
clustering = partition_greedy(net, trace, capacity=5)
print(f"20 neurons -> {clustering.n_clusters} clusters of capacity 5")
print(f"spikes crossing cluster boundaries: {clustering.global_spike_cost}")

print()
print("=== 3. Swarm placement vs. naive row-major placement ===")
hw = HardwareConfig(mesh_w=4, mesh_h=4, crossbar_capacity=5)
identity = identity_placement(clustering, hw)
id_cost, _ = hop_cost(identity, clustering, trace)
best = place_pso(clustering, hw, trace, PsoParams(20, 60), seed=0)
pso_cost, _ = hop_cost(best, clustering, trace)
print(f"identity placement cost: {id_cost}")
print(f"swarm placement cost   : {pso_cost}  "
      f"({100 * (id_cost - pso_cost) / id_cost:.0f}% fewer spike-hops)")

print()
print("=== 4. The binary mapping matrix ===")
matrix = to_mapping_matrix(clustering, best)
print(f"shape {matrix.shape}: one row per neuron, one column per crossbar")
print(f"row sums (all 1): {sorted(set(matrix.sum(axis=1).tolist()))}")
print(f"occupied crossbars: {sorted(int(j) for j in matrix.any(axis=0).nonzero()[0])}")
