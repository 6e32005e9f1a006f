"""Assign clusters to mesh coordinates.

Crossbars are linearized row-major: crossbar j sits at (x, y) with
x = j % mesh_w and y = j // mesh_w. The placement quality model is analytic:
every inter-cluster spike pays the Manhattan distance between its endpoint
crossbars, and energy is proportional to the same hop count. A placement is
also summarized by the worst source-to-sink route length in interconnect
segments, counting multi-hop chains through intermediate clusters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, InvalidPlacement, MismatchedClustering
from .hwconfig import HardwareConfig
from .network import SpikeTrace
from .partition import ClusteredSnn
from .pso import PsoParams, run_pso

Coord = tuple[int, int]


@dataclass
class Placement:
    """Injective map from cluster id to mesh coordinate."""

    crossbar_of: list[Coord]
    mesh_w: int
    mesh_h: int

    @property
    def n_clusters(self) -> int:
        return len(self.crossbar_of)

    def linear(self, cluster: int) -> int:
        x, y = self.crossbar_of[cluster]
        return y * self.mesh_w + x

    def validate(self) -> None:
        seen: set[Coord] = set()
        for c, (x, y) in enumerate(self.crossbar_of):
            if not (0 <= x < self.mesh_w and 0 <= y < self.mesh_h):
                raise InvalidPlacement(
                    f"cluster {c} placed at ({x},{y}) outside {self.mesh_w}x{self.mesh_h} mesh"
                )
            if (x, y) in seen:
                raise InvalidPlacement(f"two clusters share crossbar ({x},{y})")
            seen.add((x, y))


def manhattan(a: Coord, b: Coord) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def cluster_traffic(
    clustering: ClusteredSnn, trace: SpikeTrace
) -> dict[tuple[int, int], int]:
    """Spikes carried between each ordered cluster pair.

    One address event per source spike per destination cluster: fanout into
    several neurons of the same crossbar travels as a single packet.
    """
    counts = trace.spike_counts()
    dests = trace.destinations()
    traffic: dict[tuple[int, int], int] = {}
    for pre, posts in dests.items():
        src_cluster = clustering.cluster_of[pre]
        if counts[pre] == 0:
            continue
        for dst_cluster in {clustering.cluster_of[p] for p in posts}:
            if dst_cluster != src_cluster:
                key = (src_cluster, dst_cluster)
                traffic[key] = traffic.get(key, 0) + counts[pre]
    return traffic


def _cluster_edges(clustering: ClusteredSnn, trace: SpikeTrace) -> set[tuple[int, int]]:
    """Structural inter-cluster edges (any synapse crossing, spikes or not)."""
    edges: set[tuple[int, int]] = set()
    for pre, post in trace.weights:
        a, b = clustering.cluster_of[pre], clustering.cluster_of[post]
        if a != b:
            edges.add((a, b))
    return edges


def _longest_route(edges: set[tuple[int, int]], hops: dict[tuple[int, int], int]) -> int:
    """Max total hops along any simple source-to-sink chain of cluster edges."""
    succ: dict[int, list[int]] = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    for a in succ:
        succ[a].sort()

    # topological DP when acyclic, DFS with a visited set otherwise
    nodes = {a for a, _ in edges} | {b for _, b in edges}
    indeg = {v: 0 for v in nodes}
    for _, b in edges:
        indeg[b] += 1
    queue = [v for v in sorted(nodes) if indeg[v] == 0]
    topo: list[int] = []
    indeg_work = dict(indeg)
    while queue:
        v = queue.pop()
        topo.append(v)
        for w in succ.get(v, ()):
            indeg_work[w] -= 1
            if indeg_work[w] == 0:
                queue.append(w)
    if len(topo) == len(nodes):
        longest = {v: 0 for v in nodes}
        for v in reversed(topo):
            for w in succ.get(v, ()):
                longest[v] = max(longest[v], hops[(v, w)] + longest[w])
        return max(longest.values(), default=0)

    best = 0

    def dfs(v: int, total: int, visited: set[int]) -> None:
        nonlocal best
        best = max(best, total)
        for w in succ.get(v, ()):
            if w not in visited:
                visited.add(w)
                dfs(w, total + hops[(v, w)], visited)
                visited.remove(w)

    for v in sorted(nodes):
        dfs(v, 0, {v})
    return best


def hop_cost(
    placement: Placement, clustering: ClusteredSnn, trace: SpikeTrace
) -> tuple[int, int]:
    """Analytic interconnect cost of a placement.

    Returns (cost, max_route_segments): cost is the spike-weighted sum of
    Manhattan hops over inter-cluster edges; max_route_segments is the
    longest chain of interconnect segments any information path uses in the
    best (contention-free, minimal-routing) case.
    """
    if placement.n_clusters != clustering.n_clusters:
        raise MismatchedClustering(
            f"placement covers {placement.n_clusters} clusters, clustering has "
            f"{clustering.n_clusters}"
        )
    placement.validate()
    traffic = cluster_traffic(clustering, trace)
    cost = 0
    for (a, b), spikes in traffic.items():
        cost += spikes * manhattan(placement.crossbar_of[a], placement.crossbar_of[b])
    edges = _cluster_edges(clustering, trace)
    hops = {
        (a, b): manhattan(placement.crossbar_of[a], placement.crossbar_of[b])
        for (a, b) in edges
    }
    return cost, _longest_route(edges, hops)


def to_mapping_matrix(clustering: ClusteredSnn, placement: Placement) -> np.ndarray:
    """Binary neuron-to-crossbar matrix of shape (n_neurons, n_crossbars).

    Entry (i, j) is 1 iff neuron i lives on crossbar j; every row sums to 1
    and unused crossbars give all-zero columns.
    """
    if placement.n_clusters != clustering.n_clusters:
        raise MismatchedClustering("placement and clustering cluster counts differ")
    placement.validate()
    n = len(clustering.cluster_of)
    matrix = np.zeros((n, placement.mesh_w * placement.mesh_h), dtype=np.int8)
    for i, c in enumerate(clustering.cluster_of):
        matrix[i, placement.linear(c)] = 1
    return matrix


def validate_mapping_matrix(matrix: np.ndarray, clustering: ClusteredSnn) -> None:
    """Structural checks: row-stochastic binary, injective cluster support."""
    if not np.array_equal(matrix.sum(axis=1), np.ones(matrix.shape[0], dtype=matrix.dtype)):
        raise InvalidPlacement("mapping matrix rows must each sum to exactly 1")
    used = np.nonzero(matrix.any(axis=0))[0]
    if len(used) != clustering.n_clusters:
        raise InvalidPlacement(
            f"mapping matrix occupies {len(used)} crossbars for "
            f"{clustering.n_clusters} clusters"
        )


def identity_placement(clustering: ClusteredSnn, hw: HardwareConfig) -> Placement:
    """Cluster k on the k-th crossbar in row-major order."""
    if clustering.n_clusters > hw.n_crossbars:
        raise Infeasible(
            f"{clustering.n_clusters} clusters exceed {hw.n_crossbars} crossbars"
        )
    coords = [(k % hw.mesh_w, k // hw.mesh_w) for k in range(clustering.n_clusters)]
    return Placement(crossbar_of=coords, mesh_w=hw.mesh_w, mesh_h=hw.mesh_h)


def random_placement(clustering: ClusteredSnn, hw: HardwareConfig, seed: int = 0) -> Placement:
    """Uniformly random injective placement (comparison baseline)."""
    if clustering.n_clusters > hw.n_crossbars:
        raise Infeasible(
            f"{clustering.n_clusters} clusters exceed {hw.n_crossbars} crossbars"
        )
    rng = np.random.default_rng(seed)
    chosen = rng.permutation(hw.n_crossbars)[: clustering.n_clusters]
    coords = [(int(j) % hw.mesh_w, int(j) // hw.mesh_w) for j in chosen]
    return Placement(crossbar_of=coords, mesh_w=hw.mesh_w, mesh_h=hw.mesh_h)


def _decode_priorities(position: np.ndarray, clustering: ClusteredSnn, hw: HardwareConfig) -> Placement:
    # random-keys decode: clusters claim crossbars in descending priority
    order = sorted(range(hw.n_crossbars), key=lambda j: (-position[j], j))
    coords = [(j % hw.mesh_w, j // hw.mesh_w) for j in order[: clustering.n_clusters]]
    return Placement(crossbar_of=coords, mesh_w=hw.mesh_w, mesh_h=hw.mesh_h)


def place_pso(
    clustering: ClusteredSnn,
    hw: HardwareConfig,
    trace: SpikeTrace,
    pso_params: PsoParams | None = None,
    seed: int = 0,
    alpha: float = 1.0,
    beta: float = 1.0,
    refine: bool = False,
    refine_every: int = 10,
    refine_top_k: int = 3,
    history: list[float] | None = None,
) -> Placement:
    """Swarm search over crossbar priority vectors.

    Fitness is the weighted single objective alpha*hops + beta*hops*energy
    (latency and energy proxies share the hop model, so the optimum matches
    plain hop cost for any positive weights). The identity placement seeds
    the swarm, so the returned placement never scores worse than it. With
    ``refine`` on, every ``refine_every`` iterations the current top-k
    placements are re-scored by the cycle-accurate simulator and the best
    refined candidate is returned at the end.
    """
    if clustering.n_clusters > hw.n_crossbars:
        raise Infeasible(
            f"{clustering.n_clusters} clusters exceed {hw.n_crossbars} crossbars"
        )
    params = pso_params or PsoParams()
    weight = alpha + beta * hw.energy.e_router_hop
    traffic = cluster_traffic(clustering, trace)
    pairs = list(traffic.items())

    def evaluate(position: np.ndarray) -> tuple[float, Placement]:
        placement = _decode_priorities(position, clustering, hw)
        cost = 0
        coords = placement.crossbar_of
        for (a, b), spikes in pairs:
            cost += spikes * manhattan(coords[a], coords[b])
        return weight * cost, placement

    identity_keys = np.linspace(1.0, 0.0, hw.n_crossbars)

    if not refine:
        _, best, gbest_history = run_pso(
            hw.n_crossbars, evaluate, params, seed=seed, seeded_positions=[identity_keys]
        )
        if history is not None:
            history.extend(gbest_history)
        best.validate()
        return best

    # refinement mode: run the swarm in chunks, interleaving cycle-accurate
    # re-scoring of the champions found so far
    from .noc import simulate_hw  # local import: noc depends on this module's types

    candidates: list[Placement] = []
    refined_best: tuple[float, Placement] | None = None
    remaining = params.iterations
    chunk_seed = seed
    seeds: list[np.ndarray] = [identity_keys]
    while remaining > 0:
        step = min(refine_every, remaining)
        chunk = PsoParams(params.swarm_size, step, params.w, params.c1, params.c2)
        _, best, _ = run_pso(
            hw.n_crossbars, evaluate, chunk, seed=chunk_seed, seeded_positions=seeds
        )
        candidates.append(best)
        ranked = sorted(candidates, key=lambda p: evaluate_placement(p, pairs, weight))
        for cand in ranked[:refine_top_k]:
            log = simulate_hw(trace, clustering, cand, hw)
            latencies = [d - i for i, d, _h, _n in log.packets]
            avg_latency = sum(latencies) / len(latencies) if latencies else 0.0
            hop_energy = sum(
                h * (hw.energy.e_router_hop + hw.energy.e_link) for _i, _d, h, _n in log.packets
            )
            xb_energy = len(log.packets) * hw.energy.e_crossbar_spike
            score = alpha * avg_latency + beta * (hop_energy + xb_energy)
            if refined_best is None or score < refined_best[0]:
                refined_best = (score, cand)
        # next chunk continues from the best analytic placement found so far
        seeds = [_placement_to_keys(ranked[0], hw)]
        remaining -= step
        chunk_seed += 1

    assert refined_best is not None
    refined_best[1].validate()
    return refined_best[1]


def _placement_to_keys(placement: Placement, hw: HardwareConfig) -> np.ndarray:
    """Priority keys whose decode reproduces ``placement``."""
    keys = np.zeros(hw.n_crossbars)
    claimed = [placement.linear(k) for k in range(placement.n_clusters)]
    rank = 0
    for j in claimed:
        keys[j] = 1.0 - rank / (hw.n_crossbars + 1)
        rank += 1
    for j in range(hw.n_crossbars):
        if j not in set(claimed):
            keys[j] = 1.0 - rank / (hw.n_crossbars + 1)
            rank += 1
    return keys


def evaluate_placement(
    placement: Placement, pairs: list[tuple[tuple[int, int], int]], weight: float
) -> float:
    cost = 0
    for (a, b), spikes in pairs:
        cost += spikes * manhattan(placement.crossbar_of[a], placement.crossbar_of[b])
    return weight * cost
