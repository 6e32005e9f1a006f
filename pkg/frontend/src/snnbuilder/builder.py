"""Network builder: populations, connectors, projections, and a subprocess
bridge to the simulator CLI.

The emitted file is the backend's versioned network JSON; validation here
mirrors that schema so mistakes surface at build time with builder-level
context instead of a downstream parse error.
"""

from __future__ import annotations

import json
import random
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

FORMAT_VERSION = "v1"

CELL_KINDS = ("izhikevich", "lif", "spike_source")

_DEFAULT_PARAMS = {
    "izhikevich": {"a": 0.02, "b": 0.2, "c": -65.0, "d": 8.0, "i_bias": 0.0},
    "lif": {"tau_m": 10.0, "v_rest": 0.0, "v_thresh": 1.0, "v_reset": 0.0,
            "t_refrac": 0, "i_bias": 0.0},
}


class BuildError(ValueError):
    """The network under construction violates the file schema."""


class BackendNotFound(RuntimeError):
    """The simulator CLI could not be located."""


class BackendError(RuntimeError):
    """The simulator CLI ran but reported a failure."""


@dataclass(frozen=True)
class Population:
    """A contiguous group of same-model cells. Created via Network.population."""

    first_id: int
    size: int
    cell_type: str
    params: dict
    label: str = ""

    @property
    def ids(self) -> range:
        return range(self.first_id, self.first_id + self.size)

    def __len__(self) -> int:
        return self.size


class AllToAll:
    """Every pre cell connects to every post cell."""

    def pairs(self, pre: Population, post: Population):
        for i in pre.ids:
            for j in post.ids:
                yield i, j


class OneToOne:
    """Cell k of pre connects to cell k of post; sizes must match."""

    def pairs(self, pre: Population, post: Population):
        if pre.size != post.size:
            raise BuildError(
                f"one-to-one needs equal sizes, got {pre.size} and {post.size}"
            )
        yield from zip(pre.ids, post.ids)


class FixedProbability:
    """Each (pre, post) pair connects independently with probability p."""

    def __init__(self, p: float, seed: int = 0):
        if not 0.0 <= p <= 1.0:
            raise BuildError(f"connection probability must be in [0, 1], got {p}")
        self.p = p
        self.seed = seed

    def pairs(self, pre: Population, post: Population):
        rng = random.Random(self.seed)
        for i in pre.ids:
            for j in post.ids:
                if rng.random() < self.p:
                    yield i, j


@dataclass
class Projection:
    pre: Population
    post: Population
    connections: list[tuple[int, int]]
    weight: float
    delay: int


@dataclass
class SimulationResult:
    """Parsed spike trace from a backend run."""

    spike_times: list[list[int]]
    weights: dict[tuple[int, int], float]
    duration: int

    def spike_counts(self) -> list[int]:
        return [len(train) for train in self.spike_times]

    def population_spikes(self, pop: Population) -> list[list[int]]:
        return [self.spike_times[i] for i in pop.ids]


class Network:
    """Accumulates populations and projections, then emits or runs them."""

    def __init__(self, allow_self_loops: bool = False):
        self.allow_self_loops = allow_self_loops
        self.populations: list[Population] = []
        self.projections: list[Projection] = []
        self._n_cells = 0

    def population(self, size: int, cell_type: str, params: dict | None = None,
                   label: str = "") -> Population:
        if size < 1:
            raise BuildError(f"population size must be >= 1, got {size}")
        if cell_type not in CELL_KINDS:
            raise BuildError(
                f"unknown cell type {cell_type!r}; expected one of {CELL_KINDS}"
            )
        merged = dict(_DEFAULT_PARAMS.get(cell_type, {}))
        merged.update(params or {})
        if cell_type == "spike_source":
            if ("schedule" in merged) == ("rate" in merged):
                raise BuildError("spike_source needs exactly one of schedule/rate")
            schedule = merged.get("schedule")
            if schedule is not None and any(
                b <= a for a, b in zip(schedule, schedule[1:])
            ):
                raise BuildError("spike_source schedule must be strictly increasing")
        pop = Population(self._n_cells, size, cell_type, merged, label)
        self._n_cells += size
        self.populations.append(pop)
        return pop

    def project(self, pre: Population, post: Population, connector,
                weight: float, delay: int = 1) -> Projection:
        if delay < 1:
            raise BuildError(f"delay must be >= 1 timestep, got {delay}")
        connections = list(connector.pairs(pre, post))
        for i, j in connections:
            if i == j and not self.allow_self_loops:
                raise BuildError(f"self-loop on cell {i} (allow_self_loops is off)")
        projection = Projection(pre, post, connections, weight, delay)
        self.projections.append(projection)
        return projection

    # -- emission -----------------------------------------------------------

    def _synapse_entries(self) -> list[dict]:
        seen: set[tuple[int, int]] = set()
        entries = []
        for projection in self.projections:
            for i, j in projection.connections:
                if (i, j) in seen:
                    raise BuildError(f"duplicate synapse ({i}->{j}) across projections")
                seen.add((i, j))
                entries.append(
                    {"pre": i, "post": j, "weight": projection.weight,
                     "delay": projection.delay}
                )
        return entries

    def to_document(self) -> dict:
        neurons = []
        for pop in self.populations:
            for cell_id in pop.ids:
                neurons.append(
                    {"id": cell_id, "kind": pop.cell_type, "params": dict(pop.params)}
                )
        return {
            "version": FORMAT_VERSION,
            "synapse_mode": "CUBA",
            "allow_self_loops": self.allow_self_loops,
            "neurons": neurons,
            "synapses": self._synapse_entries(),
        }

    def to_network_file(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_document(), sort_keys=True, indent=2) + "\n",
                        encoding="utf-8")
        return path

    # -- backend bridge -------------------------------------------------------

    def run(self, duration: int, seed: int = 0, cli: str = "neurosim",
            workdir: str | Path | None = None) -> SimulationResult:
        """Emit the network, invoke `<cli> simulate`, and parse the trace.

        ``cli`` may be a command name on PATH or an explicit path to the
        backend executable.
        """
        executable = shutil.which(cli)
        if executable is None and Path(cli).exists():
            executable = str(cli)
        if executable is None:
            raise BackendNotFound(
                f"simulator CLI {cli!r} not found on PATH; install the backend "
                "(pip install neurosim) or pass cli=<path-to-binary>"
            )
        own_dir = workdir is None
        base = Path(tempfile.mkdtemp(prefix="snnbuilder_")) if own_dir else Path(workdir)
        base.mkdir(parents=True, exist_ok=True)
        net_path = self.to_network_file(base / "network.json")
        trace_path = base / "trace.json"
        proc = subprocess.run(
            [executable, "simulate", "--net", str(net_path), "--duration", str(duration),
             "--seed", str(seed), "--out", str(trace_path)],
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            raise BackendError(
                f"simulate exited {proc.returncode}: {proc.stderr.strip() or proc.stdout.strip()}"
            )
        return parse_trace(trace_path)


def parse_trace(path: str | Path) -> SimulationResult:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("version") != FORMAT_VERSION:
        raise BackendError(f"unexpected trace format version {doc.get('version')!r}")
    weights = {(int(pre), int(post)): float(w) for pre, post, w in doc["weights"]}
    return SimulationResult(
        spike_times=[list(map(int, train)) for train in doc["spikes"]],
        weights=weights,
        duration=int(doc["duration"]),
    )
