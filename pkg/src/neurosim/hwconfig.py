"""Hardware model configuration: mesh geometry, crossbar capacity, routing,
timing and energy tables."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RangeError

ROUTING_ALGORITHMS = ("XY", "WestFirst", "NorthLast", "OddEven", "DyAD")
SELECTION_STRATEGIES = ("First", "BufferLevel", "Random")


@dataclass
class EnergyTable:
    """Per-event energy costs in pJ. Absolute values are user-supplied; the
    defaults only fix relative accounting for comparisons."""

    e_router_hop: float = 1.0  # pJ per packet per router traversal
    e_link: float = 1.0  # pJ per packet per link
    e_crossbar_spike: float = 1.0  # pJ per spike processed by a crossbar

    def check(self) -> None:
        for name in ("e_router_hop", "e_link", "e_crossbar_spike"):
            if getattr(self, name) < 0:
                raise RangeError("energy values must be >= 0", field=f"energy.{name}")


@dataclass
class HardwareConfig:
    """Mesh-of-crossbars hardware description.

    ``crossbar_capacity`` bounds, per crossbar: input neurons, output
    neurons, and presynaptic connections per output neuron.
    ``cycles_per_timestep`` converts one millisecond of model time into
    interconnect cycles.
    """

    mesh_w: int
    mesh_h: int
    crossbar_capacity: int
    routing: str = "XY"
    selection: str = "First"
    buffer_depth: int = 4
    cycles_per_timestep: int = 100
    crossbar_latency: int = 1  # cycles, fixed cost of a local (in-crossbar) delivery
    dyad_threshold: float = 0.5  # buffer occupancy fraction that counts as congestion
    packet_size: int = 1  # flits; spikes are address events, kept at 1
    energy: EnergyTable = field(default_factory=EnergyTable)
    seed: int = 0

    @property
    def n_crossbars(self) -> int:
        return self.mesh_w * self.mesh_h

    def validate(self) -> None:
        if self.mesh_w < 1 or self.mesh_h < 1:
            raise RangeError("mesh dimensions must be >= 1", field="mesh_w/mesh_h")
        if self.crossbar_capacity < 1:
            raise RangeError("crossbar_capacity must be >= 1", field="crossbar_capacity")
        if self.buffer_depth < 1:
            raise RangeError("buffer_depth must be >= 1", field="buffer_depth")
        if self.cycles_per_timestep < 1:
            raise RangeError("cycles_per_timestep must be >= 1", field="cycles_per_timestep")
        if self.crossbar_latency < 0:
            raise RangeError("crossbar_latency must be >= 0", field="crossbar_latency")
        if not 0 < self.dyad_threshold <= 1:
            raise RangeError("dyad_threshold must be in (0, 1]", field="dyad_threshold")
        if self.routing not in ROUTING_ALGORITHMS:
            raise RangeError(
                f"unknown routing algorithm {self.routing!r}; expected one of {ROUTING_ALGORITHMS}",
                field="routing",
            )
        if self.selection not in SELECTION_STRATEGIES:
            raise RangeError(
                f"unknown selection strategy {self.selection!r}; expected one of {SELECTION_STRATEGIES}",
                field="selection",
            )
        if self.packet_size != 1:
            raise RangeError("only single-flit spike packets are supported", field="packet_size")
        self.energy.check()
