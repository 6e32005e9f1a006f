"""Design-space exploration: run the full pipeline per hardware/mapping
configuration and rank the results."""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import artifacts
from .errors import NeurosimError, SchemaError
from .hwconfig import HardwareConfig
from .metrics import HwReport, build_report
from .network import SnnNetwork, SpikeSource, SpikeTrace, Synapse
from .noc import DeliveryLog, ideal_network_sim, simulate_hw
from .partition import ClusteredSnn, partition_greedy, partition_pso, partition_round_robin
from .placement import (
    Placement,
    identity_placement,
    place_pso,
    random_placement,
    to_mapping_matrix,
    validate_mapping_matrix,
)
from .pso import PsoParams
from .simulate import simulate_software

PARTITION_ALGOS = ("greedy", "pso", "round_robin")
PLACEMENT_ALGOS = ("pso", "identity", "random")
RANK_KEYS = ("energy", "avg_latency", "isi_distortion", "disorder", "composite")

DEFAULT_POINT_TIMEOUT_S = 300.0


@dataclass
class DsePoint:
    """One evaluated configuration of the exploration grid."""

    name: str
    hw_doc: dict
    partition_algo: str = "greedy"
    placement_algo: str = "pso"
    report: HwReport | None = None
    wall_time: float | None = None  # informational only, never serialized
    error: str | None = None

    @property
    def completed(self) -> bool:
        return self.report is not None


def _partition(net, trace, hw, algo, seed, pso_params):
    if algo == "greedy":
        return partition_greedy(net, trace, hw.crossbar_capacity, seed, max_clusters=hw.n_crossbars)
    if algo == "pso":
        return partition_pso(net, trace, hw.crossbar_capacity, pso_params, seed)
    if algo == "round_robin":
        return partition_round_robin(net, trace, hw.crossbar_capacity)
    raise ValueError(f"unknown partition algorithm {algo!r}")


def _place(clustering, hw, trace, algo, seed, pso_params):
    if algo == "pso":
        return place_pso(clustering, hw, trace, pso_params, seed)
    if algo == "identity":
        return identity_placement(clustering, hw)
    if algo == "random":
        return random_placement(clustering, hw, seed)
    raise ValueError(f"unknown placement algorithm {algo!r}")


def run_pipeline(
    net: SnnNetwork,
    hw: HardwareConfig,
    partition_algo: str = "greedy",
    placement_algo: str = "pso",
    seed: int = 0,
    duration: int = 100,
    out_dir: str | Path | None = None,
    pso_params: PsoParams | None = None,
) -> tuple[SpikeTrace, ClusteredSnn, Placement, HwReport]:
    """Software simulation -> partition -> placement -> hardware replay -> report.

    When ``out_dir`` is given, the three artifacts land there as
    ``snn.sw.out``, ``snn.map.out`` and ``snn.hw.out``. The mapping matrix is
    structurally verified on every run.
    """
    trace = simulate_software(net, duration, seed)
    clustering = _partition(net, trace, hw, partition_algo, seed, pso_params)
    placement = _place(clustering, hw, trace, placement_algo, seed, pso_params)
    validate_mapping_matrix(to_mapping_matrix(clustering, placement), clustering)
    log_hw = simulate_hw(trace, clustering, placement, hw)
    log_ideal = ideal_network_sim(trace, clustering, placement, hw)
    report = build_report(log_hw, log_ideal, hw)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        artifacts.write_trace(trace, out / "snn.sw.out")
        artifacts.write_mapping(clustering, placement, out / "snn.map.out")
        artifacts.write_report(report, out / "snn.hw.out")
    return trace, clustering, placement, report


def resimulate_on_delivered(
    net: SnnNetwork,
    neuron: int,
    log: DeliveryLog,
    cycles_per_timestep: int,
    duration: int,
    tau_syn: float = 5.0,
) -> list[int]:
    """Re-run one neuron on the spike times the hardware actually delivered.

    The neuron's presynaptic sources are replaced by spike generators that
    replay the delivered arrival times (cycles rounded up to whole
    timesteps); its own parameters, weights and delays are kept. The spike
    count difference against the same replay of the ideal log quantifies how
    interconnect delay and disorder change the neuron's behavior.
    """
    target = net.neurons[neuron]
    if isinstance(target, SpikeSource):
        raise ValueError("cannot re-simulate a stimulus source")
    incoming = [s for s in net.synapses if s.post == neuron]
    sources = sorted({s.pre for s in incoming})
    deliveries = log.neuron_deliveries.get(neuron, [])
    schedule: dict[int, list[float]] = {src: [] for src in sources}
    for deliver_cycle, src, _seq in deliveries:
        if src in schedule:
            schedule[src].append(deliver_cycle / cycles_per_timestep)
    neurons: list[Any] = []
    index_of: dict[int, int] = {}
    for src in sources:
        # strictly increasing after cycle->timestep conversion
        times: list[float] = []
        for t in sorted(schedule[src]):
            step = math.ceil(t)
            if not times or step > times[-1]:
                times.append(step)
        index_of[src] = len(neurons)
        neurons.append(SpikeSource(schedule=times))
    target_idx = len(neurons)
    neurons.append(target)
    synapses = [
        Synapse(index_of[s.pre], target_idx, s.weight, s.delay) for s in incoming
    ]
    micro = SnnNetwork(neurons=neurons, synapses=synapses)
    trace = simulate_software(micro, duration, seed=0, tau_syn=tau_syn)
    return trace.spikes[target_idx]


# ---------------------------------------------------------------------------
# sweep


def load_grid(path: str | Path) -> list[dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, list) or not doc:
        raise SchemaError("grid must be a non-empty JSON list of point specs")
    points = []
    for idx, entry in enumerate(doc):
        if not isinstance(entry, dict) or "hw" not in entry:
            raise SchemaError(f"grid[{idx}] must be an object with an 'hw' section")
        partition_algo = entry.get("partition", "greedy")
        placement_algo = entry.get("placement", "pso")
        if partition_algo not in PARTITION_ALGOS:
            raise SchemaError(f"grid[{idx}].partition must be one of {PARTITION_ALGOS}")
        if placement_algo not in PLACEMENT_ALGOS:
            raise SchemaError(f"grid[{idx}].placement must be one of {PLACEMENT_ALGOS}")
        points.append(
            {
                "name": entry.get("name", f"point{idx}"),
                "hw": entry["hw"],
                "partition": partition_algo,
                "placement": placement_algo,
            }
        )
    return points


def _hw_from_doc(doc: dict) -> HardwareConfig:
    doc = dict(doc)
    doc.setdefault("version", artifacts.FORMAT_VERSION)
    # reuse the file reader so grid entries and config files share one schema
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as handle:
        json.dump(doc, handle)
        tmp = handle.name
    try:
        return artifacts.read_hw_config(tmp)
    finally:
        Path(tmp).unlink(missing_ok=True)


def _evaluate_point(
    net_path: str, spec: dict, seed: int, duration: int, out_dir: str | None
) -> dict:
    """Worker body: run one grid point and return a JSON-able summary."""
    start = time.perf_counter()
    try:
        net = artifacts.read_network(net_path)
        hw = _hw_from_doc(spec["hw"])
        point_dir = Path(out_dir) / spec["name"] if out_dir else None
        _trace, _clustering, _placement, report = run_pipeline(
            net,
            hw,
            partition_algo=spec["partition"],
            placement_algo=spec["placement"],
            seed=seed,
            duration=duration,
            out_dir=point_dir,
        )
        return {
            "name": spec["name"],
            "partition": spec["partition"],
            "placement": spec["placement"],
            "routing": hw.routing,
            "status": "ok",
            "wall_time": time.perf_counter() - start,
            "metrics": {
                "energy": report.hardware.energy,
                "avg_latency": report.hardware.avg_latency,
                "throughput": report.hardware.throughput,
                "isi_distortion": report.model.isi_distortion,
                "disorder": report.model.disorder,
                "disorder_pair_count": report.model.disorder_pair_count,
                "delivered": report.hardware.delivered,
            },
        }
    except NeurosimError as exc:
        return {
            "name": spec["name"],
            "partition": spec["partition"],
            "placement": spec["placement"],
            "routing": spec["hw"].get("routing", "XY"),
            "status": "error",
            "wall_time": time.perf_counter() - start,
            "error": f"{type(exc).__name__}: {exc}",
            "metrics": {},
        }


def rank_results(
    results: list[dict], rank_by: str, composite_weights: dict[str, float] | None = None
) -> list[dict]:
    """Stable ranking of point summaries by the chosen key (lower is better).

    ``composite`` normalizes each metric by its maximum over the completed
    points and sums them with the given weights (equal by default). Failed
    points sort last.
    """
    if rank_by not in RANK_KEYS:
        raise ValueError(f"rank key must be one of {RANK_KEYS}, got {rank_by!r}")
    keys = ("energy", "avg_latency", "isi_distortion", "disorder")
    weights = {k: 1.0 for k in keys}
    if composite_weights:
        weights.update(composite_weights)

    def metric(summary: dict, key: str) -> float:
        value = summary.get("metrics", {}).get(key)
        return math.inf if value is None else float(value)

    if rank_by == "composite":
        scales = {
            k: max((metric(s, k) for s in results if s["status"] == "ok"), default=1.0)
            for k in keys
        }
        scales = {k: v if v not in (0.0, math.inf) else 1.0 for k, v in scales.items()}

        def score(summary: dict) -> float:
            if summary["status"] != "ok":
                return math.inf
            parts = []
            for k in keys:
                v = metric(summary, k)
                parts.append(weights[k] * (0.0 if v == math.inf else v / scales[k]))
            return sum(parts)

    else:

        def score(summary: dict) -> float:
            if summary["status"] != "ok":
                return math.inf
            return metric(summary, rank_by)

    indexed = list(enumerate(results))
    indexed.sort(key=lambda pair: (score(pair[1]), pair[0]))
    ranked = []
    for rank, (_idx, summary) in enumerate(indexed):
        entry = dict(summary)
        entry["rank"] = rank
        entry["score"] = score(summary)
        ranked.append(entry)
    return ranked


def sweep(
    net_path: str | Path,
    grid: list[dict],
    rank_by: str = "composite",
    jobs: int = 1,
    seed: int = 0,
    duration: int = 100,
    out_dir: str | Path | None = None,
    point_timeout: float = DEFAULT_POINT_TIMEOUT_S,
) -> list[dict]:
    """Evaluate every grid point and return ranked summaries.

    Points run in separate processes up to ``jobs`` wide; each point uses the
    same seed, so results do not depend on the parallelism degree. Failures
    and timeouts are recorded per point and do not abort the sweep. Ranked
    results are written as ``results.json`` and ``summary.csv`` when
    ``out_dir`` is given (wall times are logged but kept out of the files to
    keep outputs byte-reproducible).
    """
    net_path = str(net_path)
    out_str = str(out_dir) if out_dir is not None else None
    results: list[dict | None] = [None] * len(grid)
    # points always run in worker processes so the per-point timeout can
    # convert a runaway simulation into a recorded failure (leaving the pool
    # context terminates any stragglers); jobs=1 is a single-worker pool
    methods = multiprocessing.get_all_start_methods()
    context = multiprocessing.get_context("fork" if "fork" in methods else None)
    with context.Pool(processes=max(1, jobs)) as pool:
        handles = [
            pool.apply_async(_evaluate_point, (net_path, spec, seed, duration, out_str))
            for spec in grid
        ]
        for idx, handle in enumerate(handles):
            try:
                results[idx] = handle.get(timeout=point_timeout)
            except multiprocessing.TimeoutError:
                results[idx] = {
                    "name": grid[idx]["name"],
                    "partition": grid[idx]["partition"],
                    "placement": grid[idx]["placement"],
                    "routing": grid[idx]["hw"].get("routing", "XY"),
                    "status": "timeout",
                    "metrics": {},
                }

    ranked = rank_results([r for r in results if r is not None], rank_by)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        serializable = [{k: v for k, v in entry.items() if k != "wall_time"} for entry in ranked]
        (out / "results.json").write_text(
            json.dumps(serializable, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        _write_summary_csv(serializable, out / "summary.csv")
    return ranked


def _write_summary_csv(ranked: list[dict], path: Path) -> None:
    columns = [
        "rank",
        "name",
        "partition",
        "placement",
        "routing",
        "status",
        "energy",
        "avg_latency",
        "throughput",
        "isi_distortion",
        "disorder",
        "disorder_pair_count",
        "delivered",
    ]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for entry in ranked:
            metrics = entry.get("metrics", {})
            writer.writerow(
                [
                    entry.get("rank"),
                    entry.get("name"),
                    entry.get("partition"),
                    entry.get("placement"),
                    entry.get("routing"),
                    entry.get("status"),
                ]
                + [metrics.get(k, "") for k in columns[6:]]
            )
