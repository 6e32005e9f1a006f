"""Statistics comparing hardware delivery against the zero-latency reference:
latency, throughput, energy, inter-spike intervals, spike disorder, fanout."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DimensionMismatch, InsufficientSpikes
from .hwconfig import HardwareConfig
from .noc import DeliveryLog


def avg_isi(spike_times: Sequence[float]) -> float:
    """Mean inter-spike interval of one spike train.

    Sum of consecutive gaps divided by (K - 1); undefined below two spikes
    and reported as an error rather than zero.
    """
    k = len(spike_times)
    if k < 2:
        raise InsufficientSpikes(f"need >= 2 spikes for an ISI, got {k}")
    total = 0.0
    for a, b in zip(spike_times, spike_times[1:]):
        total += b - a
    return total / (k - 1)


def spike_disorder(expected_rates: Sequence[float], actual_rates: Sequence[float]) -> float:
    """Mean squared deviation between expected and observed arrival rates.

    Both vectors list one rate per presynaptic source of the same neuron;
    zero iff the hardware preserved every source's rate exactly.
    """
    if len(expected_rates) != len(actual_rates):
        raise DimensionMismatch(
            f"rate vectors differ in length: {len(expected_rates)} vs {len(actual_rates)}"
        )
    n = len(expected_rates)
    if n < 1:
        raise DimensionMismatch("rate vectors must hold at least one source")
    return sum((f - fh) ** 2 for f, fh in zip(expected_rates, actual_rates)) / n


def disorder_pair_count(log_hw: DeliveryLog, log_ideal: DeliveryLog) -> int:
    """Count of delivered spike pairs whose arrival order inverts the source order.

    Per destination neuron, spikes are identified by (source, sequence); a
    pair counts when the hardware delivered them in the opposite order to the
    ideal log. Ties in delivery cycle are not inversions.
    """
    total = 0
    for neuron, ideal in log_ideal.neuron_deliveries.items():
        hw = log_hw.neuron_deliveries.get(neuron, [])
        ideal_rank = {(src, seq): r for r, (_c, src, seq) in enumerate(ideal)}
        arrived = [
            (deliver, ideal_rank[(src, seq)])
            for deliver, src, seq in hw
            if (src, seq) in ideal_rank
        ]
        for i in range(len(arrived)):
            for j in range(i + 1, len(arrived)):
                ci, ri = arrived[i]
                cj, rj = arrived[j]
                # arrived[i] strictly before arrived[j] but sourced after it
                if ci < cj and ri > rj:
                    total += 1
                elif cj < ci and rj > ri:
                    total += 1
    return total


def _arrival_rates(
    log: DeliveryLog, neuron: int, sources: list[int], window: int
) -> list[float]:
    counts = Counter(src for _c, src, _s in log.neuron_deliveries.get(neuron, []))
    return [counts.get(src, 0) / window for src in sources]


@dataclass
class HardwareStats:
    avg_latency: float | None
    max_latency: int | None
    latency_histogram: dict[int, int]
    throughput: float
    energy: float
    area_units: int
    delivered: int
    total_cycles: int


@dataclass
class ModelStats:
    avg_isi_source: float | None
    avg_isi_delivered: float | None
    isi_per_neuron: dict[int, dict[str, float]]
    isi_distortion: float | None
    isi_excluded_neurons: list[int]
    disorder: float | None
    disorder_per_neuron: dict[int, float]
    disorder_pair_count: int
    fanout: dict[int, int]


@dataclass
class HwReport:
    """The hardware-oriented simulation's summary artifact."""

    hardware: HardwareStats
    model: ModelStats
    notes: list[str] = field(default_factory=list)


def compute_energy(log: DeliveryLog, hw: HardwareConfig) -> float:
    """Traffic-proportional energy: router + link energy per hop of every
    packet, plus one crossbar access per transported spike (local or
    remote)."""
    e = hw.energy
    hop_energy = sum(hops * (e.e_router_hop + e.e_link) for _i, _d, hops, _n in log.packets)
    return hop_energy + len(log.packets) * e.e_crossbar_spike


def build_report(
    log_hw: DeliveryLog,
    log_ideal: DeliveryLog,
    hw: HardwareConfig,
) -> HwReport:
    """Aggregate a hardware log against its ideal reference.

    Per-neuron ISIs exist on both the source side (ideal arrivals) and the
    delivered side; neurons with fewer than two spikes in either log are
    excluded from the ISI aggregates and listed in the report. Rates for the
    disorder metric use one shared observation window so identical logs give
    exactly zero.
    """
    notes: list[str] = []

    latencies = log_hw.latencies()
    histogram = dict(sorted(Counter(latencies).items()))
    delivered = log_hw.delivered_events()
    total_cycles = log_hw.total_cycles
    if latencies:
        avg_latency: float | None = sum(latencies) / len(latencies)
        max_latency: int | None = max(latencies)
    else:
        avg_latency = None
        max_latency = None
        notes.append("no deliveries: latency fields absent")

    hardware = HardwareStats(
        avg_latency=avg_latency,
        max_latency=max_latency,
        latency_histogram=histogram,
        throughput=delivered / total_cycles if total_cycles else 0.0,
        energy=compute_energy(log_hw, hw),
        area_units=2 * hw.mesh_w * hw.mesh_h,  # one router + one crossbar per node
        delivered=delivered,
        total_cycles=total_cycles,
    )

    window = max(log_hw.total_cycles, log_ideal.total_cycles, 1)
    neurons = sorted(set(log_ideal.neuron_deliveries) | set(log_hw.neuron_deliveries))

    isi_per_neuron: dict[int, dict[str, float]] = {}
    isi_excluded: list[int] = []
    distortions: list[float] = []
    disorder_per_neuron: dict[int, float] = {}
    for neuron in neurons:
        ideal_times = [c for c, _s, _q in log_ideal.neuron_deliveries.get(neuron, [])]
        hw_times = [c for c, _s, _q in log_hw.neuron_deliveries.get(neuron, [])]
        if len(ideal_times) >= 2 and len(hw_times) >= 2:
            source_isi = avg_isi(ideal_times)
            delivered_isi = avg_isi(hw_times)
            isi_per_neuron[neuron] = {"source": source_isi, "delivered": delivered_isi}
            distortions.append(abs(delivered_isi - source_isi))
        else:
            isi_excluded.append(neuron)

        sources = sorted({src for _c, src, _q in log_ideal.neuron_deliveries.get(neuron, [])})
        if sources:
            expected = _arrival_rates(log_ideal, neuron, sources, window)
            actual = _arrival_rates(log_hw, neuron, sources, window)
            disorder_per_neuron[neuron] = spike_disorder(expected, actual)

    if isi_excluded:
        notes.append(
            f"{len(isi_excluded)} neuron(s) excluded from ISI aggregates (fewer than 2 spikes)"
        )

    source_isis = [v["source"] for v in isi_per_neuron.values()]
    delivered_isis = [v["delivered"] for v in isi_per_neuron.values()]
    model = ModelStats(
        avg_isi_source=sum(source_isis) / len(source_isis) if source_isis else None,
        avg_isi_delivered=sum(delivered_isis) / len(delivered_isis) if delivered_isis else None,
        isi_per_neuron=isi_per_neuron,
        isi_distortion=sum(distortions) / len(distortions) if distortions else None,
        isi_excluded_neurons=isi_excluded,
        disorder=(
            sum(disorder_per_neuron.values()) / len(disorder_per_neuron)
            if disorder_per_neuron
            else None
        ),
        disorder_per_neuron=disorder_per_neuron,
        disorder_pair_count=disorder_pair_count(log_hw, log_ideal),
        fanout=dict(log_ideal.fanout),
    )
    if model.isi_distortion is None:
        notes.append("ISI distortion absent: no neuron has 2+ spikes in both logs")
    if model.disorder is None:
        notes.append("disorder absent: no neuron received spikes in the reference log")

    return HwReport(hardware=hardware, model=model, notes=notes)
