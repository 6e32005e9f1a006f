"""File formats for every pipeline artifact.

All artifacts are UTF-8 JSON with a mandatory ``"version": "v1"`` field and
canonical serialization (sorted keys, two-space indent), so identical inputs
produce byte-identical files. Readers validate every structural invariant
and name the offending field in the error.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path
from typing import Any

from .errors import RangeError, SchemaError, VersionError
from .hwconfig import EnergyTable, HardwareConfig
from .metrics import HardwareStats, HwReport, ModelStats
from .network import Izhikevich, Lif, SnnNetwork, SpikeSource, SpikeTrace, Synapse
from .partition import ClusteredSnn, global_spike_cost
from .placement import Placement

FORMAT_VERSION = "v1"

_NEURON_KINDS = {
    "izhikevich": Izhikevich,
    "lif": Lif,
    "spike_source": SpikeSource,
}


class ValidationWarning(UserWarning):
    """A stored derived field disagrees with its recomputation."""


def _dump(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _load(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be a JSON object")
    version = doc.get("version")
    if version is None:
        raise SchemaError("missing format version", field="version")
    if version != FORMAT_VERSION:
        raise VersionError(f"unknown format version {version!r}", field="version")
    return doc


def _require(doc: dict, key: str, kinds: type | tuple, where: str = "") -> Any:
    field = f"{where}.{key}" if where else key
    if key not in doc:
        raise SchemaError("missing required field", field=field)
    value = doc[key]
    # bool subclasses int; never let true/false stand in for a number
    bad_bool = isinstance(value, bool) and kinds is not bool
    if bad_bool or not isinstance(value, kinds):
        raise SchemaError(f"expected {kinds}, got {type(value).__name__}", field=field)
    return value


# ---------------------------------------------------------------------------
# network description


def write_network(net: SnnNetwork, path: str | Path) -> None:
    net.validate()
    neurons = []
    for i, neuron in enumerate(net.neurons):
        params: dict[str, Any]
        if isinstance(neuron, Izhikevich):
            params = {"a": neuron.a, "b": neuron.b, "c": neuron.c, "d": neuron.d,
                      "i_bias": neuron.i_bias}
        elif isinstance(neuron, Lif):
            params = {
                "tau_m": neuron.tau_m,
                "v_rest": neuron.v_rest,
                "v_thresh": neuron.v_thresh,
                "v_reset": neuron.v_reset,
                "t_refrac": neuron.t_refrac,
                "i_bias": neuron.i_bias,
            }
        else:
            params = (
                {"schedule": list(neuron.schedule)}
                if neuron.schedule is not None
                else {"rate": neuron.rate}
            )
        neurons.append({"id": i, "kind": neuron.kind, "params": params})
    doc = {
        "version": FORMAT_VERSION,
        "synapse_mode": net.synapse_mode,
        "allow_self_loops": net.allow_self_loops,
        "neurons": neurons,
        "synapses": [
            {"pre": s.pre, "post": s.post, "weight": s.weight, "delay": s.delay}
            for s in net.synapses
        ],
    }
    _dump(doc, path)


def read_network(path: str | Path) -> SnnNetwork:
    doc = _load(path)
    raw_neurons = _require(doc, "neurons", list)
    n = len(raw_neurons)
    neurons: list[Any] = [None] * n
    for idx, entry in enumerate(raw_neurons):
        where = f"neurons[{idx}]"
        if not isinstance(entry, dict):
            raise SchemaError("neuron entry must be an object", field=where)
        nid = _require(entry, "id", int, where)
        if not 0 <= nid < n or neurons[nid] is not None:
            raise SchemaError(f"ids must be unique and dense 0..{n - 1}", field=f"{where}.id")
        kind = _require(entry, "kind", str, where)
        if kind not in _NEURON_KINDS:
            raise SchemaError(
                f"unknown neuron kind {kind!r}; expected one of {sorted(_NEURON_KINDS)}",
                field=f"{where}.kind",
            )
        params = _require(entry, "params", dict, where)
        try:
            neurons[nid] = _NEURON_KINDS[kind](**params)
        except TypeError as exc:
            raise SchemaError(f"bad parameters for {kind}: {exc}", field=f"{where}.params")
    synapses = []
    for idx, entry in enumerate(_require(doc, "synapses", list)):
        where = f"synapses[{idx}]"
        if not isinstance(entry, dict):
            raise SchemaError("synapse entry must be an object", field=where)
        synapses.append(
            Synapse(
                pre=_require(entry, "pre", int, where),
                post=_require(entry, "post", int, where),
                weight=float(_require(entry, "weight", (int, float), where)),
                delay=_require(entry, "delay", int, where) if "delay" in entry else 1,
            )
        )
    net = SnnNetwork(
        neurons=neurons,
        synapses=synapses,
        synapse_mode=doc.get("synapse_mode", "CUBA"),
        allow_self_loops=bool(doc.get("allow_self_loops", False)),
    )
    try:
        net.validate()
    except Exception as exc:
        raise SchemaError(str(exc)) from exc
    return net


# ---------------------------------------------------------------------------
# spike trace


def write_trace(trace: SpikeTrace, path: str | Path) -> None:
    trace.validate()
    doc = {
        "version": FORMAT_VERSION,
        "duration": trace.duration,
        "spikes": [list(train) for train in trace.spikes],
        "weights": [
            [pre, post, weight]
            for (pre, post), weight in sorted(trace.weights.items())
        ],
    }
    _dump(doc, path)


def read_trace(path: str | Path) -> SpikeTrace:
    doc = _load(path)
    duration = _require(doc, "duration", int)
    raw_spikes = _require(doc, "spikes", list)
    spikes: list[list[int]] = []
    for idx, train in enumerate(raw_spikes):
        where = f"spikes[{idx}]"
        if not isinstance(train, list) or any(not isinstance(t, int) for t in train):
            raise SchemaError("spike train must be a list of integers", field=where)
        spikes.append(list(train))
    weights: dict[tuple[int, int], float] = {}
    for idx, entry in enumerate(_require(doc, "weights", list)):
        where = f"weights[{idx}]"
        if not (isinstance(entry, list) and len(entry) == 3):
            raise SchemaError("weight entry must be [pre, post, weight]", field=where)
        pre, post, weight = entry
        if not isinstance(pre, int) or not isinstance(post, int):
            raise SchemaError("pre/post must be integers", field=where)
        weights[(pre, post)] = float(weight)
    trace = SpikeTrace(spikes=spikes, weights=weights, duration=duration)
    try:
        trace.validate()
    except Exception as exc:
        raise SchemaError(str(exc)) from exc
    return trace


# ---------------------------------------------------------------------------
# hardware configuration


def write_hw_config(hw: HardwareConfig, path: str | Path) -> None:
    hw.validate()
    doc = {
        "version": FORMAT_VERSION,
        "mesh_w": hw.mesh_w,
        "mesh_h": hw.mesh_h,
        "crossbar_capacity": hw.crossbar_capacity,
        "routing": hw.routing,
        "selection": hw.selection,
        "buffer_depth": hw.buffer_depth,
        "cycles_per_timestep": hw.cycles_per_timestep,
        "crossbar_latency": hw.crossbar_latency,
        "dyad_threshold": hw.dyad_threshold,
        "energy": {
            "e_router_hop": hw.energy.e_router_hop,
            "e_link": hw.energy.e_link,
            "e_crossbar_spike": hw.energy.e_crossbar_spike,
        },
        "seed": hw.seed,
    }
    _dump(doc, path)


def _energy_from(doc: dict, base_dir: Path) -> EnergyTable:
    if "energy_file" in doc and "energy" in doc:
        raise SchemaError("give either energy or energy_file, not both", field="energy")
    if "energy_file" in doc:
        ref = Path(doc["energy_file"])
        if not ref.is_absolute():
            ref = base_dir / ref
        sub = _load(ref)
        source = _require(sub, "energy", dict)
    elif "energy" in doc:
        source = _require(doc, "energy", dict)
    else:
        return EnergyTable()
    table = EnergyTable()
    for key in source:
        if key not in ("e_router_hop", "e_link", "e_crossbar_spike"):
            raise SchemaError(f"unknown energy entry {key!r}", field=f"energy.{key}")
    return EnergyTable(
        e_router_hop=float(source.get("e_router_hop", table.e_router_hop)),
        e_link=float(source.get("e_link", table.e_link)),
        e_crossbar_spike=float(source.get("e_crossbar_spike", table.e_crossbar_spike)),
    )


def read_hw_config(path: str | Path) -> HardwareConfig:
    """Load a hardware description, applying defaults for omitted fields."""
    doc = _load(path)
    defaults = dict(
        routing="XY",
        selection="First",
        buffer_depth=4,
        cycles_per_timestep=100,
        crossbar_latency=1,
        dyad_threshold=0.5,
        seed=0,
    )
    known = {
        "version",
        "mesh_w",
        "mesh_h",
        "crossbar_capacity",
        "energy",
        "energy_file",
        "packet_size",
        *defaults,
    }
    for key in doc:
        if key not in known:
            raise SchemaError(f"unknown field {key!r}", field=key)
    hw = HardwareConfig(
        mesh_w=_require(doc, "mesh_w", int),
        mesh_h=_require(doc, "mesh_h", int),
        crossbar_capacity=_require(doc, "crossbar_capacity", int),
        routing=doc.get("routing", defaults["routing"]),
        selection=doc.get("selection", defaults["selection"]),
        buffer_depth=doc.get("buffer_depth", defaults["buffer_depth"]),
        cycles_per_timestep=doc.get("cycles_per_timestep", defaults["cycles_per_timestep"]),
        crossbar_latency=doc.get("crossbar_latency", defaults["crossbar_latency"]),
        dyad_threshold=doc.get("dyad_threshold", defaults["dyad_threshold"]),
        packet_size=doc.get("packet_size", 1),
        energy=_energy_from(doc, Path(path).parent),
        seed=doc.get("seed", defaults["seed"]),
    )
    hw.validate()  # raises RangeError on out-of-range values
    return hw


# ---------------------------------------------------------------------------
# clustering and mapping


def write_clusters(clustering: ClusteredSnn, path: str | Path) -> None:
    doc = {
        "version": FORMAT_VERSION,
        "capacity": clustering.capacity,
        "cluster_of": list(clustering.cluster_of),
        "global_spike_cost": clustering.global_spike_cost,
    }
    _dump(doc, path)


def read_clusters(path: str | Path, trace: SpikeTrace | None = None) -> ClusteredSnn:
    """Load a clustering; if ``trace`` is given, the stored cost is verified."""
    doc = _load(path)
    capacity = _require(doc, "capacity", int)
    cluster_of = _require(doc, "cluster_of", list)
    if any(not isinstance(c, int) or c < 0 for c in cluster_of):
        raise SchemaError("cluster ids must be non-negative integers", field="cluster_of")
    n_clusters = max(cluster_of) + 1 if cluster_of else 0
    clusters: list[list[int]] = [[] for _ in range(n_clusters)]
    for i, c in enumerate(cluster_of):
        clusters[c].append(i)
    if any(not members for members in clusters):
        raise SchemaError("cluster ids must be dense (no empty clusters)", field="cluster_of")
    cost = _require(doc, "global_spike_cost", int)
    if trace is not None:
        pairs = list(trace.weights)
        recomputed = global_spike_cost(cluster_of, pairs, trace.spike_counts())
        if recomputed != cost:
            warnings.warn(
                f"stored global_spike_cost {cost} != recomputed {recomputed}",
                ValidationWarning,
            )
            cost = recomputed
    return ClusteredSnn(
        cluster_of=cluster_of, clusters=clusters, capacity=capacity, global_spike_cost=cost
    )


def write_mapping(
    clustering: ClusteredSnn, placement: Placement, path: str | Path
) -> None:
    placement.validate()
    doc = {
        "version": FORMAT_VERSION,
        "mesh_w": placement.mesh_w,
        "mesh_h": placement.mesh_h,
        "capacity": clustering.capacity,
        "cluster_of": list(clustering.cluster_of),
        "crossbar_of": [[x, y] for x, y in placement.crossbar_of],
        "global_spike_cost": clustering.global_spike_cost,
    }
    _dump(doc, path)


def read_mapping(path: str | Path) -> tuple[ClusteredSnn, Placement]:
    doc = _load(path)
    mesh_w = _require(doc, "mesh_w", int)
    mesh_h = _require(doc, "mesh_h", int)
    capacity = _require(doc, "capacity", int)
    cluster_of = _require(doc, "cluster_of", list)
    raw_coords = _require(doc, "crossbar_of", list)
    coords: list[tuple[int, int]] = []
    for idx, entry in enumerate(raw_coords):
        where = f"crossbar_of[{idx}]"
        if not (isinstance(entry, list) and len(entry) == 2):
            raise SchemaError("coordinate must be [x, y]", field=where)
        coords.append((int(entry[0]), int(entry[1])))
    n_clusters = max(cluster_of) + 1 if cluster_of else 0
    if len(coords) != n_clusters:
        raise SchemaError(
            f"{n_clusters} clusters but {len(coords)} crossbar coordinates",
            field="crossbar_of",
        )
    clusters: list[list[int]] = [[] for _ in range(n_clusters)]
    for i, c in enumerate(cluster_of):
        if not isinstance(c, int) or not 0 <= c < n_clusters:
            raise SchemaError(f"bad cluster id {c!r} for neuron {i}", field="cluster_of")
        clusters[c].append(i)
    placement = Placement(crossbar_of=coords, mesh_w=mesh_w, mesh_h=mesh_h)
    try:
        placement.validate()
    except Exception as exc:
        raise SchemaError(str(exc), field="crossbar_of") from exc
    clustering = ClusteredSnn(
        cluster_of=list(cluster_of),
        clusters=clusters,
        capacity=capacity,
        global_spike_cost=int(doc.get("global_spike_cost", 0)),
    )
    return clustering, placement


# ---------------------------------------------------------------------------
# hardware report


def write_report(report: HwReport, path: str | Path) -> None:
    h = report.hardware
    m = report.model
    doc = {
        "version": FORMAT_VERSION,
        "hardware": {
            "avg_latency": h.avg_latency,
            "max_latency": h.max_latency,
            "latency_histogram": {str(k): v for k, v in sorted(h.latency_histogram.items())},
            "throughput": h.throughput,
            "energy": h.energy,
            "area_units": h.area_units,
            "delivered": h.delivered,
            "total_cycles": h.total_cycles,
        },
        "model": {
            "avg_isi_source": m.avg_isi_source,
            "avg_isi_delivered": m.avg_isi_delivered,
            "isi_per_neuron": {str(k): v for k, v in sorted(m.isi_per_neuron.items())},
            "isi_distortion": m.isi_distortion,
            "isi_excluded_neurons": list(m.isi_excluded_neurons),
            "disorder": m.disorder,
            "disorder_per_neuron": {str(k): v for k, v in sorted(m.disorder_per_neuron.items())},
            "disorder_pair_count": m.disorder_pair_count,
            "fanout": {str(k): v for k, v in sorted(m.fanout.items())},
        },
        "notes": list(report.notes),
    }
    _dump(doc, path)


def read_report(path: str | Path) -> HwReport:
    doc = _load(path)
    hdoc = _require(doc, "hardware", dict)
    mdoc = _require(doc, "model", dict)
    histogram = {
        int(k): int(v)
        for k, v in _require(hdoc, "latency_histogram", dict, "hardware").items()
    }
    delivered = _require(hdoc, "delivered", int, "hardware")
    total_cycles = _require(hdoc, "total_cycles", int, "hardware")
    throughput = float(_require(hdoc, "throughput", (int, float), "hardware"))
    mass = sum(histogram.values())
    if mass != delivered:
        raise SchemaError(
            f"latency histogram mass {mass} != delivered count {delivered}",
            field="hardware.latency_histogram",
        )
    recomputed = delivered / total_cycles if total_cycles else 0.0
    if abs(recomputed - throughput) > 1e-12:
        warnings.warn(
            f"stored throughput {throughput} != delivered/total_cycles {recomputed}",
            ValidationWarning,
        )
    hardware = HardwareStats(
        avg_latency=hdoc.get("avg_latency"),
        max_latency=hdoc.get("max_latency"),
        latency_histogram=histogram,
        throughput=throughput,
        energy=float(_require(hdoc, "energy", (int, float), "hardware")),
        area_units=_require(hdoc, "area_units", int, "hardware"),
        delivered=delivered,
        total_cycles=total_cycles,
    )
    model = ModelStats(
        avg_isi_source=mdoc.get("avg_isi_source"),
        avg_isi_delivered=mdoc.get("avg_isi_delivered"),
        isi_per_neuron={
            int(k): {"source": float(v["source"]), "delivered": float(v["delivered"])}
            for k, v in _require(mdoc, "isi_per_neuron", dict, "model").items()
        },
        isi_distortion=mdoc.get("isi_distortion"),
        isi_excluded_neurons=[int(i) for i in mdoc.get("isi_excluded_neurons", [])],
        disorder=mdoc.get("disorder"),
        disorder_per_neuron={
            int(k): float(v)
            for k, v in _require(mdoc, "disorder_per_neuron", dict, "model").items()
        },
        disorder_pair_count=_require(mdoc, "disorder_pair_count", int, "model"),
        fanout={int(k): int(v) for k, v in _require(mdoc, "fanout", dict, "model").items()},
    )
    return HwReport(hardware=hardware, model=model, notes=list(doc.get("notes", [])))
