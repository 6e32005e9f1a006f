"""Software-side simulation walkthrough.

Builds a few small networks, runs the clock-driven simulator and prints the
exact spike traces it produces. Everything downstream (mapping, hardware
replay, degradation metrics) consumes these traces.
"""

from neurosim import Izhikevich, SnnNetwork, SpikeSource, simulate_software
from neurosim.synth import coincidence_net

print("=== 1. A stimulus source replays its schedule exactly ===")
net = SnnNetwork(neurons=[SpikeSource(schedule=[1.0, 3.0, 5.0])])
trace = simulate_software(net, duration=10, seed=0)
print(f"schedule [1, 3, 5] -> trace {trace.spikes[0]}")

print()
print("=== 2. Regular spiking of the 4-parameter quadratic neuron ===")
net = SnnNetwork(neurons=[Izhikevich(a=0.02, b=0.2, c=-65.0, d=8.0, i_bias=10.0)])
trace = simulate_software(net, duration=1000, seed=0)
times = trace.spikes[0]
isis = [b - a for a, b in zip(times, times[1:])]
print(f"constant input current 10 for 1000 ms -> {len(times)} spikes")
print(f"inter-spike intervals: {isis[:8]} ... (steady {isis[-1]} ms)")

print()
print("=== 3. Coincidence detection: three inputs, one output ===")
net = coincidence_net()  # inputs at 19, 20, 21 ms
trace = simulate_software(net, duration=40, seed=0)
print(f"input spike times : {[trace.spikes[i] for i in range(3)]}")
print(f"output spike time : {trace.spikes[3]}  (fires 1 ms after the last input)")

late = coincidence_net(input_times=((19.0,), (20.0,), (31.0,)))
trace = simulate_software(late, duration=60, seed=0)
print(f"third input at 31 ms -> output {trace.spikes[3]}  (window missed, silent)")

print()
print("=== 4. Poisson stimulus statistics ===")
net = SnnNetwork(neurons=[SpikeSource(rate=40.0)])
trace = simulate_software(net, duration=10_000, seed=7)
print(f"40 Hz source over 10 s -> {len(trace.spikes[0])} spikes (expected ~400)")
