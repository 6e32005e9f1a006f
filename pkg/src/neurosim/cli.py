"""Command-line interface: one subcommand per pipeline stage plus the sweep.

Every subcommand is a pure function of its input files, flags and seed, so
repeated invocations produce byte-identical outputs. Exit codes: 0 success,
1 usage, 2 schema/validation, 3 simulation failure (infeasible mapping,
deadlock, diverging dynamics). Set NEUROSIM_LOG=error|info|debug to control
verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import artifacts, dse
from .errors import (
    CapacityExceeded,
    DeadlockDetected,
    DimensionMismatch,
    Infeasible,
    InsufficientSpikes,
    InvalidNetwork,
    MismatchedClustering,
    NeurosimError,
    NonFiniteState,
    SchemaError,
)
from .metrics import build_report
from .noc import ideal_network_sim, simulate_hw
from .partition import partition_greedy, partition_pso
from .placement import identity_placement, place_pso
from .pso import PsoParams
from .simulate import simulate_software

log = logging.getLogger("neurosim")

_VALIDATION_ERRORS = (SchemaError, InvalidNetwork, MismatchedClustering, DimensionMismatch)
_SIMULATION_ERRORS = (
    Infeasible,
    DeadlockDetected,
    CapacityExceeded,
    NonFiniteState,
    InsufficientSpikes,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"error: Usage stage=cli: {message}\n")


def _setup_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("NEUROSIM_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _pso_params(args: argparse.Namespace) -> PsoParams:
    return PsoParams(swarm_size=args.swarm, iterations=args.iterations)


def _add_pso_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--swarm", type=int, default=20, help="PSO swarm size")
    parser.add_argument("--iterations", type=int, default=100, help="PSO iterations")


def cmd_simulate(args: argparse.Namespace) -> int:
    net = artifacts.read_network(args.net)
    trace = simulate_software(net, args.duration, args.seed, tau_syn=args.tau_syn)
    artifacts.write_trace(trace, args.out)
    log.info("wrote trace with %d spikes to %s", sum(trace.spike_counts()), args.out)
    return 0


def cmd_partition(args: argparse.Namespace) -> int:
    net = artifacts.read_network(args.net)
    trace = artifacts.read_trace(args.trace)
    if args.algo == "greedy":
        clustering = partition_greedy(
            net, trace, args.capacity, args.seed, max_clusters=args.max_clusters
        )
    else:
        clustering = partition_pso(
            net,
            trace,
            args.capacity,
            _pso_params(args),
            args.seed,
            n_clusters=args.clusters,
        )
    artifacts.write_clusters(clustering, args.out)
    log.info(
        "%d clusters, global spike cost %d", clustering.n_clusters, clustering.global_spike_cost
    )
    return 0


def cmd_place(args: argparse.Namespace) -> int:
    hw = artifacts.read_hw_config(args.hw)
    trace = artifacts.read_trace(args.trace) if args.trace else None
    clustering = artifacts.read_clusters(args.clusters, trace)
    if args.algo == "identity":
        placement = identity_placement(clustering, hw)
    else:
        if trace is None:
            raise SchemaError("--trace is required for PSO placement (spike-weighted cost)")
        placement = place_pso(clustering, hw, trace, _pso_params(args), args.seed)
    artifacts.write_mapping(clustering, placement, args.out)
    log.info("placed %d clusters on %dx%d mesh", clustering.n_clusters, hw.mesh_w, hw.mesh_h)
    return 0


def cmd_hwsim(args: argparse.Namespace) -> int:
    trace = artifacts.read_trace(args.trace)
    clustering, placement = artifacts.read_mapping(args.mapping)
    hw = artifacts.read_hw_config(args.hw)
    log_hw = simulate_hw(trace, clustering, placement, hw)
    log_ideal = ideal_network_sim(trace, clustering, placement, hw)
    report = build_report(log_hw, log_ideal, hw)
    artifacts.write_report(report, args.out)
    log.info(
        "delivered %d spikes in %d cycles", report.hardware.delivered, report.hardware.total_cycles
    )
    return 0


def cmd_dse(args: argparse.Namespace) -> int:
    grid = dse.load_grid(args.grid)
    ranked = dse.sweep(
        args.net,
        grid,
        rank_by=args.rank_by,
        jobs=args.jobs,
        seed=args.seed,
        duration=args.duration,
        out_dir=args.out,
        point_timeout=args.timeout,
    )
    for entry in ranked:
        log.info("rank %d: %s (%s)", entry["rank"], entry["name"], entry["status"])
    print(f"evaluated {len(ranked)} points; results in {args.out}")
    return 0


def _report_rows(report) -> list[tuple[str, object]]:
    h, m = report.hardware, report.model
    return [
        ("avg_latency_cycles", h.avg_latency),
        ("max_latency_cycles", h.max_latency),
        ("throughput_spikes_per_cycle", h.throughput),
        ("energy_pj", h.energy),
        ("area_units", h.area_units),
        ("delivered_spikes", h.delivered),
        ("total_cycles", h.total_cycles),
        ("avg_isi_source_cycles", m.avg_isi_source),
        ("avg_isi_delivered_cycles", m.avg_isi_delivered),
        ("isi_distortion_cycles", m.isi_distortion),
        ("disorder", m.disorder),
        ("disorder_pair_count", m.disorder_pair_count),
    ]


def cmd_report(args: argparse.Namespace) -> int:
    report = artifacts.read_report(args.infile)
    rows = _report_rows(report)
    if args.format == "json":
        print(json.dumps({k: v for k, v in rows}, sort_keys=True, indent=2))
    elif args.format == "csv":
        print(",".join(k for k, _ in rows))
        print(",".join("" if v is None else str(v) for _, v in rows))
    else:
        width = max(len(k) for k, _ in rows)
        for key, value in rows:
            shown = "absent" if value is None else value
            print(f"{key:<{width}}  {shown}")
        for note in report.notes:
            print(f"note: {note}")
    if args.plot:
        plot_dir = Path(args.plot)
        plot_dir.mkdir(parents=True, exist_ok=True)
        lat_lines = [
            f"{latency} {count}" for latency, count in sorted(report.hardware.latency_histogram.items())
        ]
        (plot_dir / "latency_hist.txt").write_text(
            "# latency_cycles count\n" + "\n".join(lat_lines) + "\n", encoding="utf-8"
        )
        isi_lines = [
            f"{neuron} {values['source']} {values['delivered']}"
            for neuron, values in sorted(report.model.isi_per_neuron.items())
        ]
        (plot_dir / "isi_per_neuron.txt").write_text(
            "# neuron source_isi_cycles delivered_isi_cycles\n" + "\n".join(isi_lines) + "\n",
            encoding="utf-8",
        )
        log.info("wrote histogram data to %s", plot_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="neurosim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the software simulation and write the spike trace")
    p.add_argument("--net", required=True, help="network description JSON")
    p.add_argument("--duration", type=int, required=True, help="simulation length in ms")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--tau-syn", type=float, default=5.0, help="synaptic current decay (ms)")
    p.add_argument("--out", required=True, help="output trace path (snn.sw.out)")
    p.set_defaults(func=cmd_simulate, stage="simulate")

    p = sub.add_parser("partition", help="cluster the network under crossbar capacity")
    p.add_argument("--net", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--capacity", type=int, required=True, help="crossbar capacity m")
    p.add_argument("--algo", choices=("greedy", "pso"), default="greedy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-clusters", type=int, default=None, help="cluster budget (greedy)")
    p.add_argument("--clusters", type=int, default=None, help="cluster count (pso)")
    _add_pso_flags(p)
    p.add_argument("--out", required=True, help="output clusters path")
    p.set_defaults(func=cmd_partition, stage="partition")

    p = sub.add_parser("place", help="assign clusters to mesh crossbars")
    p.add_argument("--clusters", required=True)
    p.add_argument("--hw", required=True, help="hardware config JSON")
    p.add_argument("--algo", choices=("pso", "identity"), default="pso")
    p.add_argument("--trace", default=None, help="trace path (required for pso)")
    p.add_argument("--seed", type=int, default=0)
    _add_pso_flags(p)
    p.add_argument("--out", required=True, help="output mapping path (snn.map.out)")
    p.set_defaults(func=cmd_place, stage="place")

    p = sub.add_parser("hwsim", help="cycle-accurate replay of a trace on the hardware model")
    p.add_argument("--trace", required=True)
    p.add_argument("--mapping", required=True)
    p.add_argument("--hw", required=True)
    p.add_argument("--out", required=True, help="output report path (snn.hw.out)")
    p.set_defaults(func=cmd_hwsim, stage="hwsim")

    p = sub.add_parser("dse", help="sweep hardware/mapping configurations and rank them")
    p.add_argument("--net", required=True)
    p.add_argument("--grid", required=True, help="JSON list of point specs")
    p.add_argument("--rank-by", choices=dse.RANK_KEYS, default="composite")
    p.add_argument("--jobs", type=int, default=1, help="parallel points")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=int, default=100)
    p.add_argument("--timeout", type=float, default=dse.DEFAULT_POINT_TIMEOUT_S,
                   help="per-point timeout in seconds (parallel runs)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_dse, stage="dse")

    p = sub.add_parser("report", help="summarize a hardware report")
    p.add_argument("--in", dest="infile", required=True, help="snn.hw.out path")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p.add_argument("--plot", default=None, help="directory for histogram data files")
    p.set_defaults(func=cmd_report, stage="report")

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    stage = getattr(args, "stage", "cli")
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {type(exc).__name__} stage={stage}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: SchemaError stage={stage}: missing file {exc.filename}", file=sys.stderr)
        return 2
    except _SIMULATION_ERRORS as exc:
        print(f"error: {type(exc).__name__} stage={stage}: {exc}", file=sys.stderr)
        return 3
    except NeurosimError as exc:  # anything else from this package
        print(f"error: {type(exc).__name__} stage={stage}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
