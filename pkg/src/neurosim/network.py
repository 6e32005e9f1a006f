"""Network model types: neurons, synapses, networks and spike traces.

Time is discrete everywhere: one timestep equals one millisecond of model
time. Spike times are integer timesteps; sub-timestep inputs are rounded up
when a network is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidNetwork

SYNAPSE_MODES = ("CUBA",)

IZHIKEVICH_SPIKE_MV = 30.0


@dataclass
class Izhikevich:
    """Standard 4-parameter quadratic neuron.

    State: membrane potential v (mV) and recovery variable u. ``i_bias`` is a
    constant injected current added to the synaptic current every step.
    """

    a: float = 0.02
    b: float = 0.2
    c: float = -65.0
    d: float = 8.0
    i_bias: float = 0.0

    kind = "izhikevich"

    def check(self) -> None:
        if not self.a > 0:
            raise InvalidNetwork(f"izhikevich 'a' must be > 0, got {self.a}")


@dataclass
class Lif:
    """Leaky integrate-and-fire neuron with absolute refractory period."""

    tau_m: float = 10.0  # ms
    v_rest: float = 0.0  # mV
    v_thresh: float = 1.0  # mV
    v_reset: float = 0.0  # mV
    t_refrac: int = 0  # ms
    i_bias: float = 0.0

    kind = "lif"

    def check(self) -> None:
        if not self.tau_m > 0:
            raise InvalidNetwork(f"lif tau_m must be > 0, got {self.tau_m}")
        if not self.v_thresh > self.v_reset:
            raise InvalidNetwork(
                f"lif v_thresh ({self.v_thresh}) must exceed v_reset ({self.v_reset})"
            )
        if self.t_refrac < 0:
            raise InvalidNetwork("lif t_refrac must be >= 0")


@dataclass
class SpikeSource:
    """Stimulus neuron: replays an explicit schedule or draws Poisson spikes.

    Exactly one of ``schedule`` (ms, strictly increasing) and ``rate`` (Hz)
    must be given. Schedule entries may be fractional; they are rounded up to
    the next timestep.
    """

    schedule: list[float] | None = None
    rate: float | None = None

    kind = "spike_source"

    def check(self) -> None:
        if (self.schedule is None) == (self.rate is None):
            raise InvalidNetwork("spike source needs exactly one of schedule/rate")
        if self.schedule is not None:
            for prev, cur in zip(self.schedule, self.schedule[1:]):
                if not cur > prev:
                    raise InvalidNetwork(
                        f"spike source schedule must be strictly increasing ({prev} -> {cur})"
                    )
            if self.schedule and self.schedule[0] < 0:
                raise InvalidNetwork("spike source schedule times must be >= 0")
        if self.rate is not None and not 0 <= self.rate <= 1000:
            # one timestep per ms caps the Bernoulli probability at 1
            raise InvalidNetwork(f"poisson rate must be in [0, 1000] Hz, got {self.rate}")

    def timesteps(self, duration: int) -> list[int]:
        """Schedule converted to integer timesteps inside [0, duration)."""
        if self.schedule is None:
            return []
        out: list[int] = []
        for t in self.schedule:
            step = math.ceil(t)
            if step < duration and (not out or step > out[-1]):
                out.append(step)
        return out


NeuronModel = Izhikevich | Lif | SpikeSource


@dataclass
class Synapse:
    """Directed connection; ``weight`` is a current amplitude in model units,
    ``delay`` an integer number of timesteps >= 1."""

    pre: int
    post: int
    weight: float
    delay: int = 1


@dataclass
class SnnNetwork:
    """A spiking network: indexed neurons plus a synapse list.

    Neuron ids are dense 0..n-1 list positions. Only current-based (CUBA)
    synapses are supported.
    """

    neurons: list[NeuronModel]
    synapses: list[Synapse] = field(default_factory=list)
    synapse_mode: str = "CUBA"
    allow_self_loops: bool = False

    @property
    def n_neurons(self) -> int:
        return len(self.neurons)

    def validate(self) -> None:
        if self.synapse_mode not in SYNAPSE_MODES:
            raise InvalidNetwork(f"unsupported synapse mode {self.synapse_mode!r}")
        n = len(self.neurons)
        for neuron in self.neurons:
            neuron.check()
        seen: set[tuple[int, int]] = set()
        for syn in self.synapses:
            if not (0 <= syn.pre < n and 0 <= syn.post < n):
                raise InvalidNetwork(
                    f"synapse ({syn.pre}->{syn.post}) references neuron outside 0..{n - 1}"
                )
            if syn.pre == syn.post and not self.allow_self_loops:
                raise InvalidNetwork(f"self-loop on neuron {syn.pre} (allow_self_loops is off)")
            if syn.delay < 1:
                raise InvalidNetwork(f"synapse ({syn.pre}->{syn.post}) delay must be >= 1")
            key = (syn.pre, syn.post)
            if key in seen:
                raise InvalidNetwork(f"duplicate synapse ({syn.pre}->{syn.post})")
            seen.add(key)

    def presynaptic_sets(self) -> list[set[int]]:
        """Distinct presynaptic sources per neuron."""
        pres: list[set[int]] = [set() for _ in range(len(self.neurons))]
        for syn in self.synapses:
            pres[syn.post].add(syn.pre)
        return pres

    def postsynaptic_lists(self) -> list[list[Synapse]]:
        posts: list[list[Synapse]] = [[] for _ in range(len(self.neurons))]
        for syn in self.synapses:
            posts[syn.pre].append(syn)
        return posts


@dataclass
class SpikeTrace:
    """Exact spike times per neuron plus the static synaptic weight map.

    ``spikes[i]`` is the strictly increasing list of timesteps at which
    neuron i fired; ``weights`` maps (pre, post) to the synaptic weight.
    """

    spikes: list[list[int]]
    weights: dict[tuple[int, int], float]
    duration: int

    @property
    def n_neurons(self) -> int:
        return len(self.spikes)

    def validate(self) -> None:
        if self.duration < 0:
            raise InvalidNetwork("trace duration must be >= 0")
        n = len(self.spikes)
        for i, train in enumerate(self.spikes):
            for t in train:
                if not isinstance(t, int) or isinstance(t, bool):
                    raise InvalidNetwork(
                        f"spike times must be integer timesteps, neuron {i} has {t!r}"
                    )
            for prev, cur in zip(train, train[1:]):
                if not cur > prev:
                    raise InvalidNetwork(f"spike times of neuron {i} not strictly increasing")
            if train and (train[0] < 0 or train[-1] >= self.duration):
                raise InvalidNetwork(
                    f"neuron {i} has spike times outside [0, {self.duration})"
                )
        for pre, post in self.weights:
            if not (0 <= pre < n and 0 <= post < n):
                raise InvalidNetwork(f"weight entry ({pre},{post}) outside 0..{n - 1}")

    def spike_counts(self) -> list[int]:
        return [len(train) for train in self.spikes]

    def destinations(self) -> dict[int, list[int]]:
        """Sorted distinct postsynaptic targets per source, from the weight map."""
        out: dict[int, set[int]] = {}
        for pre, post in self.weights:
            out.setdefault(pre, set()).add(post)
        return {pre: sorted(posts) for pre, posts in out.items()}
