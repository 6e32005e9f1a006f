"""Metric tests. Brute-force evaluations of the ISI and disorder formulas are
written inline and the production functions must match them exactly."""

import numpy as np
import pytest

from neurosim import (
    DimensionMismatch,
    HardwareConfig,
    InsufficientSpikes,
    Placement,
    SpikeTrace,
    avg_isi,
    build_report,
    disorder_pair_count,
    ideal_network_sim,
    simulate_hw,
    spike_disorder,
)
from neurosim.noc import DeliveryLog
from neurosim.partition import ClusteredSnn


def brute_isi(times):
    gaps = [b - a for a, b in zip(times, times[1:])]
    return sum(gaps) / len(gaps)


def brute_disorder(f, fh):
    return sum((a - b) ** 2 for a, b in zip(f, fh)) / len(f)


def test_avg_isi_uniform_train():
    assert avg_isi([2, 4, 6]) == 2


def test_avg_isi_two_spikes():
    assert avg_isi([0, 10]) == 10


def test_avg_isi_mixed_gaps():
    assert avg_isi([1, 2, 4, 8]) == pytest.approx(7 / 3, rel=1e-15)
    assert avg_isi([1, 2, 4, 8]) == brute_isi([1, 2, 4, 8])


def test_avg_isi_undefined_below_two():
    with pytest.raises(InsufficientSpikes):
        avg_isi([5])
    with pytest.raises(InsufficientSpikes):
        avg_isi([])


def test_avg_isi_matches_brute_force_randomized():
    rng = np.random.default_rng(1)
    for _ in range(200):
        k = int(rng.integers(2, 40))
        times = np.cumsum(rng.integers(1, 50, size=k)).tolist()
        assert avg_isi(times) == pytest.approx(brute_isi(times), rel=1e-12)


def test_avg_isi_translation_invariant_and_telescoping():
    rng = np.random.default_rng(2)
    for _ in range(100):
        k = int(rng.integers(2, 30))
        times = np.cumsum(rng.integers(1, 20, size=k)).tolist()
        shift = int(rng.integers(0, 1000))
        shifted = [t + shift for t in times]
        assert avg_isi(shifted) == pytest.approx(avg_isi(times), rel=1e-12)
        assert avg_isi(times) == pytest.approx((times[-1] - times[0]) / (k - 1), rel=1e-12)


def test_spike_disorder_zero_iff_equal():
    assert spike_disorder([1.0, 3.0], [1.0, 3.0]) == 0.0
    assert spike_disorder([2.0], [0.0]) == 4.0
    assert spike_disorder([1.0, 3.0], [2.0, 1.0]) == 2.5


def test_spike_disorder_matches_brute_force_randomized():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(1, 20))
        f = rng.random(n).tolist()
        fh = rng.random(n).tolist()
        assert spike_disorder(f, fh) == pytest.approx(brute_disorder(f, fh), rel=1e-12)
        assert spike_disorder(f, fh) >= 0.0
        assert spike_disorder(f, f) == 0.0


def test_spike_disorder_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        spike_disorder([1.0], [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        spike_disorder([], [])


def _log(deliveries, total_cycles=100):
    return DeliveryLog(
        neuron_deliveries=deliveries,
        packets=[],
        total_cycles=total_cycles,
        duration_cycles=total_cycles,
    )


def test_disorder_pairs_identical_logs():
    ideal = _log({0: [(1, 1, 0), (2, 2, 0)]})
    assert disorder_pair_count(ideal, ideal) == 0


def test_disorder_pairs_single_inversion():
    ideal = _log({0: [(1, 1, 0), (2, 2, 0)]})
    hw = _log({0: [(5, 2, 0), (6, 1, 0)]})  # B before A
    assert disorder_pair_count(hw, ideal) == 1


def test_disorder_pairs_full_reversal():
    ideal = _log({0: [(1, 1, 0), (2, 2, 0), (3, 3, 0)]})
    hw = _log({0: [(7, 3, 0), (8, 2, 0), (9, 1, 0)]})
    # brute force: all 3 pairs inverted
    count = 0
    order_ideal = [1, 2, 3]
    order_hw = [3, 2, 1]
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = order_hw[i], order_hw[j]
            if order_ideal.index(a) > order_ideal.index(b):
                count += 1
    assert count == 3
    assert disorder_pair_count(hw, ideal) == 3


def test_disorder_pairs_ties_do_not_count():
    ideal = _log({0: [(1, 1, 0), (2, 2, 0)]})
    hw = _log({0: [(5, 1, 0), (5, 2, 0)]})
    assert disorder_pair_count(hw, ideal) == 0


def _two_cluster_setup():
    hw = HardwareConfig(mesh_w=2, mesh_h=2, crossbar_capacity=2, cycles_per_timestep=5)
    trace = SpikeTrace(
        spikes=[[1, 4, 7], [2, 5], []],
        weights={(0, 2): 1.0, (1, 2): 1.0},
        duration=10,
    )
    clustering = ClusteredSnn(cluster_of=[0, 0, 1], clusters=[[0, 1], [2]], capacity=2,
                              global_spike_cost=5)
    placement = Placement(crossbar_of=[(0, 0), (1, 1)], mesh_w=2, mesh_h=2)
    return hw, trace, clustering, placement


def test_report_ideal_vs_ideal_is_clean():
    hw, trace, clustering, placement = _two_cluster_setup()
    ideal = ideal_network_sim(trace, clustering, placement, hw)
    report = build_report(ideal, ideal, hw)
    assert report.model.isi_distortion == 0.0
    assert report.model.disorder == 0.0
    assert report.model.disorder_pair_count == 0


def test_report_local_only_latency_is_crossbar_latency():
    hw = HardwareConfig(mesh_w=2, mesh_h=2, crossbar_capacity=3, cycles_per_timestep=5)
    trace = SpikeTrace(
        spikes=[[1, 3, 6], []], weights={(0, 1): 1.0}, duration=10
    )
    clustering = ClusteredSnn(cluster_of=[0, 0], clusters=[[0, 1]], capacity=3,
                              global_spike_cost=0)
    placement = Placement(crossbar_of=[(0, 0)], mesh_w=2, mesh_h=2)
    log = simulate_hw(trace, clustering, placement, hw)
    ideal = ideal_network_sim(trace, clustering, placement, hw)
    report = build_report(log, ideal, hw)
    assert report.hardware.avg_latency == hw.crossbar_latency
    # constant shift leaves ISIs intact
    assert report.model.isi_distortion == 0.0
    assert report.model.disorder == 0.0


def test_report_internal_consistency():
    hw, trace, clustering, placement = _two_cluster_setup()
    log = simulate_hw(trace, clustering, placement, hw)
    ideal = ideal_network_sim(trace, clustering, placement, hw)
    report = build_report(log, ideal, hw)
    mass = sum(report.hardware.latency_histogram.values())
    assert mass == report.hardware.delivered
    assert report.hardware.throughput == pytest.approx(
        report.hardware.delivered / report.hardware.total_cycles, rel=1e-15
    )
    # independent recomputation of every headline stat from the log
    latencies = []
    for inject, deliver, _h, n_dst in log.packets:
        latencies += [deliver - inject] * n_dst
    assert report.hardware.avg_latency == pytest.approx(
        sum(latencies) / len(latencies), rel=1e-15
    )
    assert report.hardware.max_latency == max(latencies)
    assert report.hardware.delivered == sum(
        len(v) for v in log.neuron_deliveries.values()
    )
    e = hw.energy
    expected_energy = sum(
        h * (e.e_router_hop + e.e_link) for _i, _d, h, _n in log.packets
    ) + len(log.packets) * e.e_crossbar_spike
    assert report.hardware.energy == pytest.approx(expected_energy, rel=1e-15)
    assert report.hardware.area_units == 2 * hw.mesh_w * hw.mesh_h


def test_report_fanout_counts_distinct_destinations():
    hw, trace, clustering, placement = _two_cluster_setup()
    log = simulate_hw(trace, clustering, placement, hw)
    ideal = ideal_network_sim(trace, clustering, placement, hw)
    report = build_report(log, ideal, hw)
    assert report.model.fanout == {0: 1, 1: 1}


def test_xy_single_pair_preserves_order():
    """Deterministic single-path routing with FIFO queues cannot reorder
    spikes between one source and one destination crossbar."""
    import numpy as np

    rng = np.random.default_rng(4)
    for trial in range(10):
        times = sorted(int(t) for t in rng.choice(80, size=12, replace=False))
        trace = SpikeTrace(spikes=[times, []], weights={(0, 1): 1.0}, duration=80)
        clustering = ClusteredSnn(cluster_of=[0, 1], clusters=[[0], [1]], capacity=1,
                                  global_spike_cost=len(times))
        hw = HardwareConfig(mesh_w=4, mesh_h=4, crossbar_capacity=1, routing="XY",
                            cycles_per_timestep=2, buffer_depth=1)
        placement = Placement(crossbar_of=[(0, 0), (3, 2)], mesh_w=4, mesh_h=4)
        log = simulate_hw(trace, clustering, placement, hw)
        ideal = ideal_network_sim(trace, clustering, placement, hw)
        assert disorder_pair_count(log, ideal) == 0


def test_report_flags_insufficient_spikes():
    hw = HardwareConfig(mesh_w=2, mesh_h=2, crossbar_capacity=2, cycles_per_timestep=5)
    trace = SpikeTrace(spikes=[[1], []], weights={(0, 1): 1.0}, duration=5)
    clustering = ClusteredSnn(cluster_of=[0, 1], clusters=[[0], [1]], capacity=1,
                              global_spike_cost=1)
    placement = Placement(crossbar_of=[(0, 0), (1, 0)], mesh_w=2, mesh_h=2)
    log = simulate_hw(trace, clustering, placement, hw)
    ideal = ideal_network_sim(trace, clustering, placement, hw)
    report = build_report(log, ideal, hw)
    assert report.model.isi_distortion is None
    assert 1 in report.model.isi_excluded_neurons
    assert any("excluded" in note for note in report.notes)
