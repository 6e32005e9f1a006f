"""Synthetic network and trace generators used by experiments and tests."""

from __future__ import annotations

import numpy as np

from .network import Lif, SnnNetwork, SpikeSource, SpikeTrace, Synapse

# Coincidence-detector constants. With tau_m = 2 ms, tau_syn = 5 ms and unit
# weights, three input spikes on consecutive milliseconds drive the membrane
# to ~3.65 one step after the last arrival, while any two inputs peak near
# ~2.65; a threshold between the two fires on the triple and stays silent
# otherwise. Verified against a dense (dt = 0.1 ms) integration in the tests.
COINCIDENCE_WEIGHT = 1.0
COINCIDENCE_THRESHOLD = 3.2
COINCIDENCE_TAU_M = 2.0


def coincidence_net(
    input_times: tuple[tuple[float, ...], ...] = ((19.0,), (20.0,), (21.0,)),
    weight: float = COINCIDENCE_WEIGHT,
    v_thresh: float = COINCIDENCE_THRESHOLD,
    tau_m: float = COINCIDENCE_TAU_M,
    delay: int = 1,
) -> SnnNetwork:
    """Three spike sources feeding one integrate-and-fire output.

    With the default constants the output fires exactly once when all three
    inputs arrive within a 3 ms window, and not at all when any one input is
    late: a minimal testbed for how delivery delay and reordering suppress
    downstream spikes.
    """
    neurons = [SpikeSource(schedule=list(times)) for times in input_times]
    neurons.append(Lif(tau_m=tau_m, v_rest=0.0, v_thresh=v_thresh, v_reset=0.0, t_refrac=2))
    synapses = [Synapse(i, len(input_times), weight, delay) for i in range(len(input_times))]
    return SnnNetwork(neurons=neurons, synapses=synapses)


def two_layer_dense(
    n: int = 18,
    rate_hz: float = 50.0,
    weight: float = 0.4,
    v_thresh: float = 1.5,
    seed: int = 0,
) -> SnnNetwork:
    """Fully connected feedforward pair of layers (n Poisson sources -> n LIF)."""
    rng = np.random.default_rng(seed)
    neurons: list = [SpikeSource(rate=rate_hz) for _ in range(n)]
    neurons += [Lif(tau_m=10.0, v_rest=0.0, v_thresh=v_thresh, v_reset=0.0) for _ in range(n)]
    synapses = [
        Synapse(i, n + j, weight * float(0.5 + rng.random()), 1)
        for i in range(n)
        for j in range(n)
    ]
    return SnnNetwork(neurons=neurons, synapses=synapses)


def digit_scale_net(seed: int = 0, input_rate_hz: float = 8.0) -> SnnNetwork:
    """894-neuron feedforward network (784 inputs, 100 hidden, 10 outputs).

    Connectivity is block-structured so the network packs onto 36 crossbars
    of capacity 25: contiguous id chunks of 25 neurons draw all their inputs
    from at most 25 distinct sources. Hidden neurons sample their synapses
    from a 12-input window assigned to their chunk; the outputs read a fixed
    13-neuron hidden pool.
    """
    rng = np.random.default_rng(seed)
    n_inputs, n_hidden, n_outputs = 784, 100, 10
    neurons: list = [SpikeSource(rate=input_rate_hz) for _ in range(n_inputs)]
    neurons += [
        Lif(tau_m=10.0, v_rest=0.0, v_thresh=2.0, v_reset=0.0, t_refrac=1)
        for _ in range(n_hidden + n_outputs)
    ]

    # id-chunk -> input window feeding the hidden neurons of the chunk; each
    # window fits the 25 input rows of the chunk's crossbar (the first chunk
    # shares its rows with 9 resident inputs, the last leaves 13 rows for the
    # output pool)
    hidden_windows = {
        (0, 16): list(range(775, 784)) + list(range(0, 16)),
        (16, 41): list(range(25, 50)),
        (41, 66): list(range(50, 75)),
        (66, 91): list(range(75, 100)),
        (91, 100): list(range(100, 112)),
    }
    synapses: list[Synapse] = []
    for (lo, hi), window in hidden_windows.items():
        for h in range(lo, hi):
            fan_in = 8
            pres = rng.choice(window, size=fan_in, replace=False)
            for p in sorted(int(x) for x in pres):
                synapses.append(Synapse(p, n_inputs + h, float(0.4 + 0.4 * rng.random()), 1))

    # outputs live in the final chunk with hiddens 91..99; their sources must
    # stay outside that chunk, so they read hiddens 16..28 (13 distinct)
    pool = [n_inputs + h for h in range(16, 29)]
    for o in range(n_outputs):
        for p in pool:
            synapses.append(Synapse(p, n_inputs + n_hidden + o, float(0.2 + 0.3 * rng.random()), 1))

    return SnnNetwork(neurons=neurons, synapses=synapses)


def random_net(
    n: int,
    edge_prob: float,
    seed: int = 0,
    max_indegree: int | None = None,
    weight_range: tuple[float, float] = (0.5, 1.5),
) -> SnnNetwork:
    """Random directed network of LIF neurons plus a few stimulus sources."""
    rng = np.random.default_rng(seed)
    n_sources = max(1, n // 4)
    neurons: list = [SpikeSource(rate=40.0) for _ in range(n_sources)]
    neurons += [
        Lif(tau_m=10.0, v_rest=0.0, v_thresh=1.0, v_reset=0.0) for _ in range(n - n_sources)
    ]
    lo, hi = weight_range
    synapses: list[Synapse] = []
    for post in range(n):
        candidates = [pre for pre in range(n) if pre != post]
        chosen = [pre for pre in candidates if rng.random() < edge_prob]
        if max_indegree is not None and len(chosen) > max_indegree:
            chosen = sorted(
                int(x) for x in rng.choice(chosen, size=max_indegree, replace=False)
            )
        for pre in chosen:
            synapses.append(Synapse(pre, post, float(lo + (hi - lo) * rng.random()), 1))
    return SnnNetwork(neurons=neurons, synapses=synapses)


def random_trace(net: SnnNetwork, duration: int, mean_spikes: float, seed: int = 0) -> SpikeTrace:
    """Fabricated trace with random spike trains (no dynamics involved).

    Useful where only spike counts and orderings matter, e.g. partitioning
    and placement studies.
    """
    rng = np.random.default_rng(seed)
    spikes: list[list[int]] = []
    for _ in range(net.n_neurons):
        k = min(duration, rng.poisson(mean_spikes))
        times = sorted(int(t) for t in rng.choice(duration, size=k, replace=False))
        spikes.append(times)
    weights = {(s.pre, s.post): s.weight for s in net.synapses}
    trace = SpikeTrace(spikes=spikes, weights=weights, duration=duration)
    trace.validate()
    return trace
