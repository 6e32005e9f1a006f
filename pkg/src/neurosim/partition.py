"""Cut a network into clusters that fit crossbar capacity.

A cluster occupies one crossbar: its members are the crossbar's output
neurons, and the distinct presynaptic sources of those members (internal or
external) occupy its input rows. Both counts are bounded by the capacity
``m``. Synapses whose endpoints land in different clusters become global and
cost one interconnect spike per presynaptic firing; the optimizers minimize
that total.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible
from .network import SnnNetwork, SpikeTrace
from .pso import PsoParams, run_pso

# Pair-swap refinement is quadratic in neuron count; beyond this size the
# single-move passes are kept as the only local search.
SWAP_PASS_MAX_NEURONS = 256
# The full Kernighan-Lin tentative-sequence pass is cubic; desk scale only.
KL_PASS_MAX_NEURONS = 64


@dataclass
class ClusteredSnn:
    """Result of partitioning: a dense cluster id per neuron.

    ``global_spike_cost`` is the exact number of spikes crossing cluster
    boundaries, recomputable from the trace at any time.
    """

    cluster_of: list[int]
    clusters: list[list[int]]
    capacity: int
    global_spike_cost: int

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def global_synapses(self, net: SnnNetwork) -> list[tuple[int, int]]:
        return [
            (syn.pre, syn.post)
            for syn in net.synapses
            if self.cluster_of[syn.pre] != self.cluster_of[syn.post]
        ]


def global_spike_cost(
    cluster_of: list[int], synapses: list[tuple[int, int]], spike_count: list[int]
) -> int:
    """Independent recomputation of the partition objective."""
    return sum(spike_count[pre] for pre, post in synapses if cluster_of[pre] != cluster_of[post])


class _CapacityTracker:
    """Incremental feasibility bookkeeping for one clustering.

    Per cluster we track the member count and a refcount of presynaptic
    sources; a cluster is feasible while members <= m and distinct sources
    <= m. Removing a member never breaks feasibility.
    """

    def __init__(self, n_clusters: int, pres: list[set[int]], capacity: int):
        self.m = capacity
        self.pres = pres
        self.size = [0] * n_clusters
        self.sources: list[dict[int, int]] = [{} for _ in range(n_clusters)]

    def can_add(self, neuron: int, cluster: int) -> bool:
        if self.size[cluster] + 1 > self.m:
            return False
        src = self.sources[cluster]
        new_sources = sum(1 for p in self.pres[neuron] if p not in src)
        return len(src) + new_sources <= self.m

    def add(self, neuron: int, cluster: int) -> None:
        self.size[cluster] += 1
        src = self.sources[cluster]
        for p in self.pres[neuron]:
            src[p] = src.get(p, 0) + 1

    def remove(self, neuron: int, cluster: int) -> None:
        self.size[cluster] -= 1
        src = self.sources[cluster]
        for p in self.pres[neuron]:
            if src[p] == 1:
                del src[p]
            else:
                src[p] -= 1

    def can_swap(self, a: int, cl_a: int, b: int, cl_b: int) -> bool:
        """Feasibility of exchanging a (in cl_a) with b (in cl_b)."""
        for incoming, outgoing, cluster in ((b, a, cl_a), (a, b, cl_b)):
            src = self.sources[cluster]
            pres_in = self.pres[incoming]
            pres_out = self.pres[outgoing]
            removed = sum(1 for p in pres_out if p not in pres_in and src[p] == 1)
            added = sum(1 for p in pres_in if p not in pres_out and p not in src)
            if len(src) - removed + added > self.m:
                return False
        return True


def check_feasibility(net: SnnNetwork, capacity: int, max_clusters: int | None) -> None:
    pres = net.presynaptic_sets()
    worst = max((len(p) for p in pres), default=0)
    if worst > capacity:
        raise Infeasible(
            f"a neuron has {worst} presynaptic connections but capacity is {capacity}; "
            "raise the crossbar capacity"
        )
    if max_clusters is not None and net.n_neurons > max_clusters * capacity:
        raise Infeasible(
            f"{net.n_neurons} neurons cannot fit {max_clusters} clusters of capacity {capacity}; "
            "raise the capacity or the mesh size"
        )


def _validate_clustering(
    cluster_of: list[int], pres: list[set[int]], capacity: int
) -> list[list[int]]:
    n_clusters = max(cluster_of) + 1 if cluster_of else 0
    clusters: list[list[int]] = [[] for _ in range(n_clusters)]
    for i, c in enumerate(cluster_of):
        clusters[c].append(i)
    for c, members in enumerate(clusters):
        if len(members) > capacity:
            raise Infeasible(f"cluster {c} holds {len(members)} neurons > capacity {capacity}")
        sources = set().union(*(pres[i] for i in members)) if members else set()
        if len(sources) > capacity:
            raise Infeasible(
                f"cluster {c} needs {len(sources)} input rows > capacity {capacity}"
            )
    return clusters


def _compact(cluster_of: list[int]) -> list[int]:
    """Relabel cluster ids densely, in order of first appearance by neuron id."""
    remap: dict[int, int] = {}
    out = []
    for c in cluster_of:
        if c not in remap:
            remap[c] = len(remap)
        out.append(remap[c])
    return out


def _bfs_order(net: SnnNetwork) -> list[int]:
    n = net.n_neurons
    adjacent: list[set[int]] = [set() for _ in range(n)]
    for syn in net.synapses:
        adjacent[syn.pre].add(syn.post)
        adjacent[syn.post].add(syn.pre)
    order: list[int] = []
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in sorted(adjacent[i]):
                if not seen[j]:
                    seen[j] = True
                    queue.append(j)
    return order


# exact backtracking seeding is exponential; only applied to desk-scale nets
EXACT_SEED_MAX_NEURONS = 24


def _exact_seed(pres: list[set[int]], capacity: int, n_clusters: int) -> list[int] | None:
    """Backtracking search for any capacity-feasible assignment.

    Needed when heuristic seeding overflows a tight cluster budget although a
    feasible packing exists. Clusters are interchangeable, so a neuron may
    only open the next unused cluster (symmetry pruning).
    """
    n = len(pres)
    order = sorted(range(n), key=lambda i: (-len(pres[i]), i))
    tracker = _CapacityTracker(n_clusters, pres, capacity)
    assignment = [-1] * n

    def place(k: int, used: int) -> bool:
        if k == n:
            return True
        i = order[k]
        for c in range(min(used + 1, n_clusters)):
            if tracker.can_add(i, c):
                tracker.add(i, c)
                assignment[i] = c
                if place(k + 1, max(used, c + 1)):
                    return True
                tracker.remove(i, c)
                assignment[i] = -1
        return False

    return assignment if place(0, 0) else None


def _seed_within_budget(
    net: SnnNetwork, pres: list[set[int]], capacity: int, budget: int | None
) -> list[int] | None:
    """Feasible starting assignment under an optional cluster budget."""
    cluster_of, _tracker = _seed_by_order(_bfs_order(net), pres, capacity)
    if budget is None or max(cluster_of) < budget:
        return cluster_of
    chunked = [i // capacity for i in range(len(pres))]
    try:
        _validate_clustering(chunked, pres, capacity)
        return chunked
    except Infeasible:
        pass
    if len(pres) <= EXACT_SEED_MAX_NEURONS:
        return _exact_seed(pres, capacity, budget)
    return None


def _seed_by_order(
    order: list[int], pres: list[set[int]], capacity: int
) -> tuple[list[int], _CapacityTracker]:
    n = len(order)
    cluster_of = [-1] * n
    tracker = _CapacityTracker(n, pres, capacity)  # upper bound: one cluster per neuron
    current = 0
    opened = 1
    for i in order:
        if tracker.can_add(i, current):
            tracker.add(i, current)
            cluster_of[i] = current
        else:
            current = opened
            opened += 1
            tracker.add(i, current)
            cluster_of[i] = current
    return cluster_of, tracker


def _finish(
    cluster_of: list[int],
    net: SnnNetwork,
    synapse_pairs: list[tuple[int, int]],
    spike_count: list[int],
    capacity: int,
) -> ClusteredSnn:
    cluster_of = _compact(cluster_of)
    clusters = _validate_clustering(cluster_of, net.presynaptic_sets(), capacity)
    cost = global_spike_cost(cluster_of, synapse_pairs, spike_count)
    return ClusteredSnn(
        cluster_of=cluster_of, clusters=clusters, capacity=capacity, global_spike_cost=cost
    )


def partition_greedy(
    net: SnnNetwork,
    trace: SpikeTrace,
    capacity: int,
    seed: int = 0,
    max_clusters: int | None = None,
    history: list[int] | None = None,
) -> ClusteredSnn:
    """Greedy min-cut clustering in the Kernighan-Lin spirit.

    Clusters are seeded by BFS order under capacity, then improved by
    repeated passes that move one neuron at a time (largest strict decrease
    in global spike cost wins, ties to the lowest cluster id). When a pass
    stalls on small instances, a pair-swap pass runs as well: capacity-tight
    clusterings often admit no feasible single move, while an exchanging pair
    still improves the cut. Deterministic; ``seed`` is accepted for interface
    symmetry with the stochastic partitioners. ``history``, when given,
    collects the cost after seeding and after every accepted change.
    """
    del seed  # deterministic algorithm
    net.validate()
    check_feasibility(net, capacity, max_clusters)
    n = net.n_neurons
    if n == 0:
        return ClusteredSnn(cluster_of=[], clusters=[], capacity=capacity, global_spike_cost=0)

    pres = net.presynaptic_sets()
    spike_count = trace.spike_counts()
    synapse_pairs = [(syn.pre, syn.post) for syn in net.synapses]

    cluster_of = _seed_within_budget(net, pres, capacity, max_clusters)
    if cluster_of is None:
        raise Infeasible(
            f"no feasible seeding of {n} neurons into {max_clusters} clusters of "
            f"capacity {capacity} was found"
        )
    tracker = _CapacityTracker(max(cluster_of) + 1, pres, capacity)
    for i, c in enumerate(cluster_of):
        tracker.add(i, c)

    out_edges: list[list[int]] = [[] for _ in range(n)]
    in_edges: list[list[int]] = [[] for _ in range(n)]
    for pre, post in synapse_pairs:
        out_edges[pre].append(post)
        in_edges[post].append(pre)

    def move_delta(i: int, src: int, dst: int) -> int:
        delta = 0
        for j in out_edges[i]:
            cj = cluster_of[j]
            if cj == src and j != i:
                delta += spike_count[i]
            elif cj == dst:
                delta -= spike_count[i]
        for k in in_edges[i]:
            ck = cluster_of[k]
            if ck == src and k != i:
                delta += spike_count[k]
            elif ck == dst:
                delta -= spike_count[k]
        return delta

    n_clusters = max(cluster_of) + 1
    visit_order = sorted(range(n), key=lambda i: (-spike_count[i], i))
    cost = global_spike_cost(cluster_of, synapse_pairs, spike_count)
    if history is not None:
        history.append(cost)

    def record(delta: int) -> None:
        nonlocal cost
        cost += delta
        if history is not None:
            history.append(cost)

    def single_move_pass() -> bool:
        improved = False
        for i in visit_order:
            src = cluster_of[i]
            best_delta = 0
            best_dst = -1
            for dst in range(n_clusters):
                if dst == src:
                    continue
                if not tracker.can_add(i, dst):
                    continue
                delta = move_delta(i, src, dst)
                if delta < best_delta:
                    best_delta = delta
                    best_dst = dst
            if best_dst >= 0:
                tracker.remove(i, src)
                tracker.add(i, best_dst)
                cluster_of[i] = best_dst
                record(best_delta)
                improved = True
        return improved

    def swap_pass() -> bool:
        improved = False
        for a in range(n):
            for b in range(a + 1, n):
                ca, cb = cluster_of[a], cluster_of[b]
                if ca == cb:
                    continue
                delta = move_delta(a, ca, cb) + move_delta(b, cb, ca)
                # edges between a and b stay global after the exchange;
                # both move deltas wrongly credited them as internalized
                if b in out_edges[a]:
                    delta += 2 * spike_count[a]
                if a in out_edges[b]:
                    delta += 2 * spike_count[b]
                if delta < 0 and tracker.can_swap(a, ca, b, cb):
                    tracker.remove(a, ca)
                    tracker.remove(b, cb)
                    tracker.add(a, cb)
                    tracker.add(b, ca)
                    cluster_of[a], cluster_of[b] = cb, ca
                    record(delta)
                    improved = True
        return improved

    def kl_sequence_pass() -> bool:
        """Kernighan-Lin proper: tentatively apply the best move/swap even
        when it raises the cost, lock the touched neurons, and keep the best
        prefix of the sequence. Escapes multi-neuron exchanges that single
        moves and single swaps cannot reach."""
        locked = [False] * n
        actions: list[tuple] = []
        cumulative = 0
        trace_costs: list[int] = []

        def best_action():
            best = None
            for i in range(n):
                if locked[i]:
                    continue
                src = cluster_of[i]
                for dst in range(n_clusters):
                    if dst == src or not tracker.can_add(i, dst):
                        continue
                    delta = move_delta(i, src, dst)
                    if best is None or delta < best[0]:
                        best = (delta, "move", i, src, dst)
            for a in range(n):
                if locked[a]:
                    continue
                for b in range(a + 1, n):
                    if locked[b]:
                        continue
                    ca, cb = cluster_of[a], cluster_of[b]
                    if ca == cb:
                        continue
                    delta = move_delta(a, ca, cb) + move_delta(b, cb, ca)
                    if b in out_edges[a]:
                        delta += 2 * spike_count[a]
                    if a in out_edges[b]:
                        delta += 2 * spike_count[b]
                    if (best is None or delta < best[0]) and tracker.can_swap(a, ca, b, cb):
                        best = (delta, "swap", a, ca, b, cb)
            return best

        while True:
            action = best_action()
            if action is None:
                break
            if action[1] == "move":
                _delta, _kind, i, src, dst = action
                tracker.remove(i, src)
                tracker.add(i, dst)
                cluster_of[i] = dst
                locked[i] = True
            else:
                _delta, _kind, a, ca, b, cb = action
                tracker.remove(a, ca)
                tracker.remove(b, cb)
                tracker.add(a, cb)
                tracker.add(b, ca)
                cluster_of[a], cluster_of[b] = cb, ca
                locked[a] = locked[b] = True
            actions.append(action)
            cumulative += action[0]
            trace_costs.append(cumulative)

        if not actions:
            return False
        best_prefix = min(range(len(trace_costs)), key=lambda k: (trace_costs[k], k))
        keep = best_prefix + 1 if trace_costs[best_prefix] < 0 else 0
        for action in reversed(actions[keep:]):
            if action[1] == "move":
                _delta, _kind, i, src, dst = action
                tracker.remove(i, dst)
                tracker.add(i, src)
                cluster_of[i] = src
            else:
                _delta, _kind, a, ca, b, cb = action
                tracker.remove(a, cb)
                tracker.remove(b, ca)
                tracker.add(a, ca)
                tracker.add(b, cb)
                cluster_of[a], cluster_of[b] = ca, cb
        if keep > 0:
            record(trace_costs[keep - 1])
            return True
        return False

    while True:
        if single_move_pass():
            continue
        if n <= SWAP_PASS_MAX_NEURONS and swap_pass():
            continue
        if n <= KL_PASS_MAX_NEURONS and kl_sequence_pass():
            continue
        break

    return _finish(cluster_of, net, synapse_pairs, spike_count, capacity)


def _decode_assignment(
    scores: np.ndarray, pres: list[set[int]], capacity: int
) -> list[int] | None:
    """Capacity-respecting argmax decode of one particle.

    Neurons are assigned in id order to their highest-scoring cluster that
    stays feasible; overflow falls through to the next-highest score.
    """
    n, k = scores.shape
    tracker = _CapacityTracker(k, pres, capacity)
    assignment = [-1] * n
    for i in range(n):
        # stable order: descending score, ties to the lower cluster id
        for c in sorted(range(k), key=lambda c: (-scores[i, c], c)):
            if tracker.can_add(i, c):
                tracker.add(i, c)
                assignment[i] = c
                break
        else:
            return None
    return assignment


def partition_pso(
    net: SnnNetwork,
    trace: SpikeTrace,
    capacity: int,
    pso_params: PsoParams | None = None,
    seed: int = 0,
    n_clusters: int | None = None,
    history: list[float] | None = None,
) -> ClusteredSnn:
    """Swarm search over per-neuron cluster scores.

    A particle holds one continuous score per (neuron, cluster); decoding is
    the capacity-respecting argmax above. One particle is seeded from the
    BFS packing so a feasible decode always exists, and the global best is
    never worse than the best initial decode. ``history`` collects the
    global-best cost per iteration.
    """
    net.validate()
    params = pso_params or PsoParams()
    if n_clusters is None:
        n_clusters = max(1, math.ceil(net.n_neurons / capacity))
    check_feasibility(net, capacity, n_clusters)
    n = net.n_neurons
    if n == 0:
        return ClusteredSnn(cluster_of=[], clusters=[], capacity=capacity, global_spike_cost=0)

    pres = net.presynaptic_sets()
    spike_count = trace.spike_counts()
    synapse_pairs = [(syn.pre, syn.post) for syn in net.synapses]

    def evaluate(position: np.ndarray) -> tuple[float, list[int] | None]:
        scores = position.reshape(n, n_clusters)
        assignment = _decode_assignment(scores, pres, capacity)
        if assignment is None:
            return math.inf, None
        return float(global_spike_cost(assignment, synapse_pairs, spike_count)), assignment

    # warm start from a feasible packing when one is found; a missing warm
    # start is fine, the decode repairs random particles
    seeds: list[np.ndarray] = []
    seed_assignment = _seed_within_budget(net, pres, capacity, n_clusters)
    if seed_assignment is not None:
        seeded = np.zeros((n, n_clusters))
        for i, c in enumerate(seed_assignment):
            seeded[i, c] = 1.0
        seeds.append(seeded.ravel())

    cost, assignment, gbest_history = run_pso(
        n * n_clusters, evaluate, params, seed=seed, seeded_positions=seeds
    )
    if history is not None:
        history.extend(gbest_history)
    if assignment is None:
        raise Infeasible("no particle decoded to a feasible clustering")
    return _finish(assignment, net, synapse_pairs, spike_count, capacity)


def partition_round_robin(
    net: SnnNetwork, trace: SpikeTrace, capacity: int, n_clusters: int | None = None
) -> ClusteredSnn:
    """Load-balancing baseline: neuron i goes to cluster i mod k.

    Stands in for a neutral "spread the neurons evenly" strategy; raises
    Infeasible when the balanced spread violates capacity.
    """
    net.validate()
    if n_clusters is None:
        n_clusters = max(1, math.ceil(net.n_neurons / capacity))
    cluster_of = [i % n_clusters for i in range(net.n_neurons)]
    spike_count = trace.spike_counts()
    synapse_pairs = [(syn.pre, syn.post) for syn in net.synapses]
    return _finish(cluster_of, net, synapse_pairs, spike_count, capacity)


def random_feasible_assignment(
    net: SnnNetwork,
    trace: SpikeTrace,
    capacity: int,
    n_clusters: int,
    seed: int = 0,
    attempts: int = 200,
) -> ClusteredSnn:
    """Uniformly random feasible clustering (comparison baseline)."""
    net.validate()
    check_feasibility(net, capacity, n_clusters)
    pres = net.presynaptic_sets()
    rng = np.random.default_rng(seed)
    n = net.n_neurons
    for _ in range(attempts):
        tracker = _CapacityTracker(n_clusters, pres, capacity)
        cluster_of = [-1] * n
        ok = True
        for i in rng.permutation(n):
            options = [c for c in range(n_clusters) if tracker.can_add(int(i), c)]
            if not options:
                ok = False
                break
            c = int(rng.choice(options))
            tracker.add(int(i), c)
            cluster_of[int(i)] = c
        if ok:
            spike_count = trace.spike_counts()
            synapse_pairs = [(syn.pre, syn.post) for syn in net.synapses]
            return _finish(cluster_of, net, synapse_pairs, spike_count, capacity)
    raise Infeasible(f"no random feasible assignment found in {attempts} attempts")
