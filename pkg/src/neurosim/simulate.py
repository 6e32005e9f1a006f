"""Clock-driven software simulation producing exact spike traces.

Forward Euler at dt = 1 ms. Synapses are current-based: a presynaptic spike
at t adds its weight to the postsynaptic input current at t + delay, and the
accumulated current decays exponentially with ``tau_syn``. The trace this
produces is the reference input for the hardware-oriented simulation; it is
bit-identical for a fixed (network, duration, seed).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NonFiniteState
from .network import IZHIKEVICH_SPIKE_MV, Izhikevich, Lif, SnnNetwork, SpikeSource, SpikeTrace

DEFAULT_TAU_SYN_MS = 5.0


def _poisson_spikes(rng: np.random.Generator, rate_hz: float, duration: int) -> list[int]:
    # Bernoulli per 1 ms bin; p = rate/1000.
    if rate_hz <= 0:
        return []
    draws = rng.random(duration) < (rate_hz / 1000.0)
    return [int(t) for t in np.nonzero(draws)[0]]


def simulate_software(
    net: SnnNetwork,
    duration: int,
    seed: int = 0,
    tau_syn: float = DEFAULT_TAU_SYN_MS,
) -> SpikeTrace:
    """Integrate ``net`` for ``duration`` timesteps and return its spike trace.

    Update order within a timestep: decay synaptic currents, apply arrivals
    scheduled for this step, advance every neuron, then queue the outgoing
    spikes of neurons that fired. The quadratic-neuron update is the coupled
    Euler step (both right-hand sides evaluated at the pre-update state);
    spike when v >= 30 mV, then v <- c, u <- u + d.
    """
    net.validate()
    if duration < 1:
        raise ValueError(f"duration must be >= 1 timestep, got {duration}")
    if tau_syn <= 0:
        raise ValueError("tau_syn must be > 0")

    n = net.n_neurons
    rng = np.random.default_rng(seed)

    # Stimulus spikes are drawn up front, in neuron-id order, so the RNG
    # stream does not depend on runtime state.
    source_spikes: dict[int, list[int]] = {}
    for i, neuron in enumerate(net.neurons):
        if isinstance(neuron, SpikeSource):
            if neuron.rate is not None:
                source_spikes[i] = _poisson_spikes(rng, neuron.rate, duration)
            else:
                source_spikes[i] = neuron.timesteps(duration)
    source_sets = {i: set(ts) for i, ts in source_spikes.items()}

    posts = net.postsynaptic_lists()
    max_delay = max((syn.delay for syn in net.synapses), default=1)
    ring: list[list[tuple[int, float]]] = [[] for _ in range(max_delay + 1)]

    decay = math.exp(-1.0 / tau_syn)
    syn_current = [0.0] * n
    v = [0.0] * n
    u = [0.0] * n
    refrac_until = [0] * n
    for i, neuron in enumerate(net.neurons):
        if isinstance(neuron, Izhikevich):
            v[i] = neuron.c
            u[i] = neuron.b * neuron.c
        elif isinstance(neuron, Lif):
            v[i] = neuron.v_rest

    spikes: list[list[int]] = [[] for _ in range(n)]

    for t in range(duration):
        bucket = ring[t % (max_delay + 1)]
        for i in range(n):
            syn_current[i] *= decay
        for post, w in bucket:
            syn_current[post] += w
        bucket.clear()

        fired: list[int] = []
        for i, neuron in enumerate(net.neurons):
            if isinstance(neuron, SpikeSource):
                if t in source_sets[i]:
                    fired.append(i)
                continue
            current = syn_current[i] + neuron.i_bias
            if isinstance(neuron, Izhikevich):
                vi_old = v[i]
                vi = vi_old + (0.04 * vi_old * vi_old + 5.0 * vi_old + 140.0 - u[i] + current)
                ui = u[i] + neuron.a * (neuron.b * vi_old - u[i])
                if not (math.isfinite(vi) and math.isfinite(ui)):
                    raise NonFiniteState(f"neuron {i} diverged at t={t} (v={vi}, u={ui})")
                if vi >= IZHIKEVICH_SPIKE_MV:
                    fired.append(i)
                    vi = neuron.c
                    ui = ui + neuron.d
                v[i] = vi
                u[i] = ui
            else:  # Lif
                if t < refrac_until[i]:
                    continue
                vi = v[i] + (neuron.v_rest - v[i]) / neuron.tau_m + current
                if not math.isfinite(vi):
                    raise NonFiniteState(f"neuron {i} diverged at t={t} (v={vi})")
                if vi >= neuron.v_thresh:
                    fired.append(i)
                    vi = neuron.v_reset
                    refrac_until[i] = t + 1 + neuron.t_refrac
                v[i] = vi

        for i in fired:
            spikes[i].append(t)
            for syn in posts[i]:
                ring[(t + syn.delay) % (max_delay + 1)].append((syn.post, syn.weight))

    weights = {(syn.pre, syn.post): syn.weight for syn in net.synapses}
    trace = SpikeTrace(spikes=spikes, weights=weights, duration=duration)
    trace.validate()
    return trace
