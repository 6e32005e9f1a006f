"""Cycle-accurate simulation of spikes crossing the crossbar mesh.

Model summary
-------------
Every mesh node holds a crossbar and a router with five input FIFOs (north,
south, east, west, local), each ``buffer_depth`` deep. Spikes travel as
single-flit address-event packets, one packet per (source spike, destination
crossbar); fanout inside the destination crossbar happens on arrival. All
routers advance simultaneously each cycle: heads of the input FIFOs request
an output direction (routing algorithm + selection strategy), each output
port grants one request per cycle by round-robin, and a granted packet moves
one hop if the downstream FIFO has a free slot (backpressure). Intra-cluster
spikes never enter the mesh; they are delivered after the fixed crossbar
latency.

Coordinates: x grows eastward, y grows northward, (0, 0) is the south-west
corner. Crossbar j sits at (j % mesh_w, j // mesh_w).

All five routing algorithms are minimal: every admissible direction strictly
reduces the Manhattan distance to the destination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityExceeded, DeadlockDetected, MismatchedClustering
from .hwconfig import HardwareConfig
from .network import SpikeTrace
from .partition import ClusteredSnn
from .placement import Placement

NORTH, SOUTH, EAST, WEST, LOCAL = 0, 1, 2, 3, 4
# fixed priority used by the First selection strategy and for tie-breaking
FIRST_ORDER = (WEST, EAST, NORTH, SOUTH)
_DELTA = {NORTH: (0, 1), SOUTH: (0, -1), EAST: (1, 0), WEST: (-1, 0)}
_OPPOSITE = {NORTH: SOUTH, SOUTH: NORTH, EAST: WEST, WEST: EAST}

# cycles with zero movement tolerated before declaring deadlock, per unit of
# mesh area times buffer depth
_STALL_FACTOR = 8


def _productive(cur: tuple[int, int], dst: tuple[int, int]) -> list[int]:
    dirs = []
    if dst[0] > cur[0]:
        dirs.append(EAST)
    elif dst[0] < cur[0]:
        dirs.append(WEST)
    if dst[1] > cur[1]:
        dirs.append(NORTH)
    elif dst[1] < cur[1]:
        dirs.append(SOUTH)
    return dirs


def _order(dirs: list[int]) -> tuple[int, ...]:
    return tuple(sorted(dirs, key=FIRST_ORDER.index))


def _odd_even_dirs(
    cur: tuple[int, int], dst: tuple[int, int], src: tuple[int, int]
) -> tuple[int, ...]:
    # Turn prohibitions: no turn out of eastward travel at even columns, no
    # turn into westward travel at odd columns. Position-based form: the
    # source column is exempt because no eastward travel happened yet.
    ex = dst[0] - cur[0]
    ey = dst[1] - cur[1]
    dirs: list[int] = []
    if ex == 0:
        dirs.append(NORTH if ey > 0 else SOUTH)
    elif ex > 0:
        if ey == 0:
            dirs.append(EAST)
        else:
            if cur[0] % 2 == 1 or cur[0] == src[0]:
                dirs.append(NORTH if ey > 0 else SOUTH)
            if dst[0] % 2 == 1 or ex != 1:
                dirs.append(EAST)
    else:
        dirs.append(WEST)
        if cur[0] % 2 == 0 and ey != 0:
            dirs.append(NORTH if ey > 0 else SOUTH)
    return _order(dirs)


def admissible_dirs(
    algo: str,
    cur: tuple[int, int],
    dst: tuple[int, int],
    src: tuple[int, int] | None = None,
    congested: bool = False,
) -> tuple[int, ...]:
    """Admissible next-hop directions for a packet at ``cur`` heading to ``dst``.

    ``src`` is the packet's source crossbar; the odd-even turn rules need it
    to tell first hops from genuine turns (defaults to ``cur``). ``congested``
    feeds the DyAD mode switch and is ignored by the other algorithms.
    Always non-empty and strictly distance-reducing.
    """
    if cur == dst:
        raise ValueError("packet is already at its destination")
    if src is None:
        src = cur
    if algo == "DyAD":
        algo = "OddEven" if congested else "XY"
    if algo == "XY":
        if dst[0] > cur[0]:
            return (EAST,)
        if dst[0] < cur[0]:
            return (WEST,)
        return (NORTH,) if dst[1] > cur[1] else (SOUTH,)
    if algo == "WestFirst":
        if dst[0] < cur[0]:
            return (WEST,)
        return _order(_productive(cur, dst))
    if algo == "NorthLast":
        dirs = _productive(cur, dst)
        if dirs == [NORTH]:
            return (NORTH,)
        return _order([d for d in dirs if d != NORTH])
    if algo == "OddEven":
        return _odd_even_dirs(cur, dst, src)
    raise ValueError(f"unknown routing algorithm {algo!r}")


def generate_route(
    algo: str,
    src: tuple[int, int],
    dst: tuple[int, int],
) -> list[int]:
    """Idle-network route using the First selection (for analysis and tests)."""
    route: list[int] = []
    cur = src
    while cur != dst:
        dirs = admissible_dirs(algo, cur, dst, src=src, congested=False)
        step = min(dirs, key=FIRST_ORDER.index)
        route.append(step)
        delta = _DELTA[step]
        cur = (cur[0] + delta[0], cur[1] + delta[1])
    return route


class _Packet:
    __slots__ = (
        "src",
        "dsts",
        "sx",
        "sy",
        "tx",
        "ty",
        "inject",
        "seq",
        "hops",
        "is_bg",
        "decided_rid",
        "out_dir",
    )

    def __init__(self, src, dsts, sxy, txy, inject, seq, is_bg=False):
        self.src = src
        self.dsts = dsts
        self.sx, self.sy = sxy
        self.tx, self.ty = txy
        self.inject = inject
        self.seq = seq
        self.hops = 0
        self.is_bg = is_bg
        self.decided_rid = -1
        self.out_dir = -1


@dataclass
class BackgroundTraffic:
    """Synthetic uniform-random load layered on top of the trace packets.

    ``rate`` is the per-node injection probability per cycle. Background
    packets occupy buffers and links like spike packets do but deliver to no
    neuron; they exist to create contention in experiments and property
    tests.
    """

    rate: float
    cycles: int
    seed: int = 0
    start_cycle: int = 0

    def generate(self, n_routers: int) -> list[tuple[int, int, int]]:
        """(cycle, src_router, dst_router) triples, deterministically."""
        rng = np.random.default_rng(self.seed)
        draws = rng.random((self.cycles, n_routers)) < self.rate
        cycles_idx, nodes_idx = np.nonzero(draws)
        dst_raw = rng.integers(0, n_routers - 1, size=len(cycles_idx))
        out = []
        for c, s, d in zip(cycles_idx, nodes_idx, dst_raw):
            dst = int(d) + (1 if int(d) >= int(s) else 0)  # skip self
            out.append((int(c) + self.start_cycle, int(s), dst))
        return out


@dataclass
class DeliveryLog:
    """What the interconnect delivered, and when.

    ``neuron_deliveries[i]`` lists (deliver_cycle, src_neuron, seq) for every
    spike that reached neuron i, in delivery order (which need not equal
    source order: that gap is exactly what the disorder metrics measure).
    ``packets`` holds one (inject, deliver, hops, n_destinations) record per
    crossbar-level transport, local deliveries included with hops = 0.
    """

    neuron_deliveries: dict[int, list[tuple[int, int, int]]]
    packets: list[tuple[int, int, int, int]]
    total_cycles: int
    duration_cycles: int
    injected_packets: int = 0
    delivered_packets: int = 0
    background_injected: int = 0
    background_delivered: int = 0
    fanout: dict[int, int] = field(default_factory=dict)

    def delivered_events(self) -> int:
        return sum(len(v) for v in self.neuron_deliveries.values())

    def latencies(self) -> list[int]:
        """Latency of every spike delivery event, in cycles."""
        out: list[int] = []
        for inject, deliver, _hops, n_dst in self.packets:
            out.extend([deliver - inject] * n_dst)
        return out


class _MeshSim:
    """One synchronous simulation instance. Not reusable."""

    def __init__(self, hw: HardwareConfig):
        hw.validate()
        self.hw = hw
        self.w = hw.mesh_w
        self.h = hw.mesh_h
        self.n_routers = self.w * self.h
        depth = hw.buffer_depth
        self.depth = depth
        self.fifos: list[list[list[_Packet]]] = [
            [[] for _ in range(5)] for _ in range(self.n_routers)
        ]
        self.rr = [[0] * 5 for _ in range(self.n_routers)]
        self.pending: list[list[_Packet]] = [[] for _ in range(self.n_routers)]
        self.neighbor = [[-1] * 4 for _ in range(self.n_routers)]
        for rid in range(self.n_routers):
            x, y = rid % self.w, rid // self.w
            if y + 1 < self.h:
                self.neighbor[rid][NORTH] = rid + self.w
            if y - 1 >= 0:
                self.neighbor[rid][SOUTH] = rid - self.w
            if x + 1 < self.w:
                self.neighbor[rid][EAST] = rid + 1
            if x - 1 >= 0:
                self.neighbor[rid][WEST] = rid - 1
        self.rng = np.random.default_rng(hw.seed)
        self.stall_limit = self.n_routers * depth * _STALL_FACTOR

    def _congested_near(self, rid: int) -> bool:
        threshold = self.hw.dyad_threshold * self.depth
        for d in range(4):
            nb = self.neighbor[rid][d]
            if nb < 0:
                continue
            for fifo in self.fifos[nb]:
                if len(fifo) > threshold:
                    return True
        return False

    def _decide(self, pkt: _Packet, rid: int, cx: int, cy: int) -> int:
        """Output port for the head packet at router rid."""
        if pkt.tx == cx and pkt.ty == cy:
            return LOCAL
        hw = self.hw
        algo = hw.routing
        selection = hw.selection
        static = algo != "DyAD" and selection != "BufferLevel"
        if static and pkt.decided_rid == rid:
            return pkt.out_dir
        congested = algo == "DyAD" and self._congested_near(rid)
        dirs = admissible_dirs(
            algo, (cx, cy), (pkt.tx, pkt.ty), src=(pkt.sx, pkt.sy), congested=congested
        )
        if len(dirs) == 1 or selection == "First":
            choice = min(dirs, key=FIRST_ORDER.index)
        elif selection == "BufferLevel":
            # least-occupied downstream input FIFO, ties in First order
            def occupancy(d: int) -> tuple[int, int]:
                nb = self.neighbor[rid][d]
                return len(self.fifos[nb][_OPPOSITE[d]]), FIRST_ORDER.index(d)

            choice = min(dirs, key=occupancy)
        else:  # Random: one seeded draw per (packet, router)
            if pkt.decided_rid == rid:
                return pkt.out_dir
            choice = dirs[int(self.rng.integers(len(dirs)))]
        pkt.decided_rid = rid
        pkt.out_dir = choice
        return choice

    def run(
        self,
        schedule: list[tuple[int, int, _Packet]],
        duration_cycles: int,
        log: DeliveryLog,
        crossbar_latency: int,
    ) -> int:
        """Drive the mesh until every scheduled packet is delivered.

        ``schedule`` holds (cycle, router, packet) sorted by cycle with a
        deterministic intra-cycle order. Returns the cycle count simulated.
        """
        by_cycle: dict[int, list[tuple[int, _Packet]]] = {}
        for cycle, rid, pkt in schedule:
            by_cycle.setdefault(cycle, []).append((rid, pkt))
        inject_cycles = sorted(by_cycle)
        next_inject = 0

        fifos = self.fifos
        pending = self.pending
        neighbor = self.neighbor
        depth = self.depth
        live = 0  # packets inside FIFOs or pending at routers
        remaining = len(schedule)
        active: set[int] = set()
        stall = 0
        t = 0
        last_cycle = 0

        while remaining > 0 or live > 0:
            if live == 0 and next_inject < len(inject_cycles):
                t = max(t, inject_cycles[next_inject])

            moved = False
            # scheduled injections enter the router-side source queue
            if next_inject < len(inject_cycles) and inject_cycles[next_inject] == t:
                for rid, pkt in by_cycle[inject_cycles[next_inject]]:
                    pending[rid].append(pkt)
                    active.add(rid)
                    live += 1
                    remaining -= 1
                next_inject += 1

            # source queue drains into the local input FIFO while space lasts
            for rid in sorted(active):
                queue = pending[rid]
                if not queue:
                    continue
                local = fifos[rid][LOCAL]
                while queue and len(local) < depth:
                    local.append(queue.pop(0))
                    moved = True

            # decide, arbitrate and move
            granted_in: dict[tuple[int, int], int] = {}
            moves: list[tuple[int, int, int, _Packet]] = []  # (rid, in_port, out_dir, pkt)
            ejections: list[tuple[int, int, _Packet]] = []
            for rid in sorted(active):
                router_fifos = fifos[rid]
                cx, cy = rid % self.w, rid // self.w
                requests: dict[int, list[int]] = {}
                for port in range(5):
                    fifo = router_fifos[port]
                    if not fifo:
                        continue
                    out_dir = self._decide(fifo[0], rid, cx, cy)
                    requests.setdefault(out_dir, []).append(port)
                for out_dir, ports in requests.items():
                    ptr = self.rr[rid][out_dir]
                    winner = -1
                    for k in range(5):
                        cand = (ptr + k) % 5
                        if cand in ports:
                            winner = cand
                            break
                    pkt = router_fifos[winner][0]
                    if out_dir == LOCAL:
                        ejections.append((rid, winner, pkt))
                        self.rr[rid][out_dir] = (winner + 1) % 5
                    else:
                        nb = neighbor[rid][out_dir]
                        in_port = _OPPOSITE[out_dir]
                        key = (nb, in_port)
                        used = granted_in.get(key, 0)
                        if len(fifos[nb][in_port]) + used < depth:
                            granted_in[key] = used + 1
                            moves.append((rid, winner, out_dir, pkt))
                            self.rr[rid][out_dir] = (winner + 1) % 5

            for rid, port, out_dir, pkt in moves:
                fifos[rid][port].pop(0)
                nb = neighbor[rid][out_dir]
                fifos[nb][_OPPOSITE[out_dir]].append(pkt)
                pkt.hops += 1
                active.add(nb)
                moved = True

            for rid, port, pkt in ejections:
                fifos[rid][port].pop(0)
                live -= 1
                moved = True
                deliver = t + crossbar_latency
                last_cycle = max(last_cycle, deliver)
                if pkt.is_bg:
                    log.background_delivered += 1
                else:
                    log.delivered_packets += 1
                    log.packets.append((pkt.inject, deliver, pkt.hops, len(pkt.dsts)))
                    for dst in pkt.dsts:
                        log.neuron_deliveries.setdefault(dst, []).append(
                            (deliver, pkt.src, pkt.seq)
                        )

            # drop idle routers from the active set
            for rid in [r for r in active]:
                if not pending[rid] and not any(fifos[rid]):
                    active.discard(rid)

            if live > 0 and not moved:
                stall += 1
                if stall >= self.stall_limit:
                    raise DeadlockDetected(
                        f"no packet moved for {stall} cycles at t={t} "
                        f"({live} packets in flight, routing={self.hw.routing})"
                    )
            else:
                stall = 0
            t += 1

        return max(t, duration_cycles, last_cycle + 1)


def _neuron_coords(
    trace: SpikeTrace, clustering: ClusteredSnn, placement: Placement
) -> list[tuple[int, int]]:
    if len(clustering.cluster_of) < trace.n_neurons:
        raise CapacityExceeded(
            f"trace covers {trace.n_neurons} neurons but the mapping covers only "
            f"{len(clustering.cluster_of)}"
        )
    if len(clustering.cluster_of) > trace.n_neurons:
        raise MismatchedClustering(
            f"mapping references {len(clustering.cluster_of)} neurons but the trace "
            f"has {trace.n_neurons}"
        )
    if placement.n_clusters != clustering.n_clusters:
        raise MismatchedClustering("placement and clustering cluster counts differ")
    placement.validate()
    return [placement.crossbar_of[clustering.cluster_of[i]] for i in range(trace.n_neurons)]


def simulate_hw(
    trace: SpikeTrace,
    clustering: ClusteredSnn,
    placement: Placement,
    hw: HardwareConfig,
    background: BackgroundTraffic | None = None,
) -> DeliveryLog:
    """Replay a spike trace through the mesh and log every delivery.

    Spike at timestep ts injects at cycle ts * cycles_per_timestep. Local
    (same-crossbar) destinations are served after the fixed crossbar latency
    with no interconnect traffic; every remote destination crossbar receives
    one packet. Deterministic for fixed inputs and ``hw.seed``.
    """
    hw.validate()
    xy = _neuron_coords(trace, clustering, placement)
    cpt = hw.cycles_per_timestep
    l_xb = hw.crossbar_latency
    dests = trace.destinations()
    cluster_of = clustering.cluster_of

    log = DeliveryLog(
        neuron_deliveries={},
        packets=[],
        total_cycles=0,
        duration_cycles=trace.duration * cpt,
        fanout={pre: len(posts) for pre, posts in dests.items()},
    )

    schedule: list[tuple[int, int, _Packet]] = []
    for src, posts in sorted(dests.items()):
        src_cluster = cluster_of[src]
        src_xy = xy[src]
        src_rid = src_xy[1] * hw.mesh_w + src_xy[0]
        by_cluster: dict[int, list[int]] = {}
        for post in posts:
            by_cluster.setdefault(cluster_of[post], []).append(post)
        local = by_cluster.pop(src_cluster, None)
        remote = sorted(by_cluster.items())
        for seq, ts in enumerate(trace.spikes[src]):
            inject = ts * cpt
            if local:
                deliver = inject + l_xb
                log.packets.append((inject, deliver, 0, len(local)))
                for post in local:
                    log.neuron_deliveries.setdefault(post, []).append((deliver, src, seq))
            for dst_cluster, members in remote:
                pkt = _Packet(src, tuple(members), src_xy, placement.crossbar_of[dst_cluster],
                              inject, seq)
                schedule.append((inject, src_rid, pkt))
                log.injected_packets += 1

    if background is not None:
        for seq, (cycle, src_rid, dst_rid) in enumerate(background.generate(hw.n_crossbars)):
            sxy = (src_rid % hw.mesh_w, src_rid // hw.mesh_w)
            txy = (dst_rid % hw.mesh_w, dst_rid // hw.mesh_w)
            pkt = _Packet(-1, (), sxy, txy, cycle, seq, is_bg=True)
            schedule.append((cycle, src_rid, pkt))
            log.background_injected += 1

    # deterministic intra-cycle order: spikes before background, then by
    # source router, source neuron, sequence number, destination
    schedule.sort(key=lambda e: (e[0], e[2].is_bg, e[1], e[2].src, e[2].seq, e[2].tx, e[2].ty))

    sim = _MeshSim(hw)
    end = sim.run(schedule, trace.duration * cpt, log, l_xb)
    log.total_cycles = end

    for deliveries in log.neuron_deliveries.values():
        deliveries.sort(key=lambda d: (d[0], d[1], d[2]))
    return log


def ideal_network_sim(
    trace: SpikeTrace,
    clustering: ClusteredSnn,
    placement: Placement,
    hw: HardwareConfig,
) -> DeliveryLog:
    """Zero-latency reference: every destination hears each spike at its
    injection cycle. This is the software-view log that hardware logs are
    measured against, so its distortion and disorder are zero by
    construction."""
    hw.validate()
    _neuron_coords(trace, clustering, placement)  # consistency checks only
    cpt = hw.cycles_per_timestep
    dests = trace.destinations()

    log = DeliveryLog(
        neuron_deliveries={},
        packets=[],
        total_cycles=trace.duration * cpt,
        duration_cycles=trace.duration * cpt,
        fanout={pre: len(posts) for pre, posts in dests.items()},
    )
    for src, posts in sorted(dests.items()):
        for seq, ts in enumerate(trace.spikes[src]):
            inject = ts * cpt
            log.packets.append((inject, inject, 0, len(posts)))
            for post in posts:
                log.neuron_deliveries.setdefault(post, []).append((inject, src, seq))
    for deliveries in log.neuron_deliveries.values():
        deliveries.sort(key=lambda d: (d[0], d[1], d[2]))
    return log


def run_synthetic_traffic(
    hw: HardwareConfig, rate: float, cycles: int, seed: int = 0
) -> DeliveryLog:
    """Pure background-traffic run for routing property tests.

    Injects uniform-random packets at ``rate`` per node per cycle for
    ``cycles`` cycles, then drains the network. The returned log carries the
    injected/delivered counters for conservation checks.
    """
    hw.validate()
    background = BackgroundTraffic(rate=rate, cycles=cycles, seed=seed)
    log = DeliveryLog(neuron_deliveries={}, packets=[], total_cycles=0, duration_cycles=cycles)
    schedule: list[tuple[int, int, _Packet]] = []
    for seq, (cycle, src_rid, dst_rid) in enumerate(background.generate(hw.n_crossbars)):
        sxy = (src_rid % hw.mesh_w, src_rid // hw.mesh_w)
        txy = (dst_rid % hw.mesh_w, dst_rid // hw.mesh_w)
        pkt = _Packet(-1, (), sxy, txy, cycle, seq, is_bg=True)
        schedule.append((cycle, src_rid, pkt))
        log.background_injected += 1
    schedule.sort(key=lambda e: (e[0], e[1], e[2].seq))
    sim = _MeshSim(hw)
    log.total_cycles = sim.run(schedule, cycles, log, hw.crossbar_latency)
    return log
