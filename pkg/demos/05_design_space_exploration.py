"""Design-space exploration: sweep routing algorithms and mapping strategies
over one network, rank the configurations, and print the summary table the
sweep writes to disk.
"""

import json
import tempfile
from pathlib import Path

from neurosim.artifacts import write_network
from neurosim.dse import load_grid, sweep
from neurosim.synth import two_layer_dense

workdir = Path(tempfile.mkdtemp(prefix="neurosim_dse_"))
net_path = workdir / "net.json"
write_network(two_layer_dense(n=18, rate_hz=60, seed=2), net_path)

base_hw = {"mesh_w": 6, "mesh_h": 6, "crossbar_capacity": 18, "cycles_per_timestep": 10}
grid = [
    {"name": f"{algo:9s}".strip(), "hw": dict(base_hw, routing=algo),
     "partition": "greedy", "placement": "identity"}
    for algo in ("XY", "WestFirst", "NorthLast", "OddEven", "DyAD")
] + [
    {"name": "pso-map", "hw": dict(base_hw, routing="XY"),
     "partition": "greedy", "placement": "pso"},
    {"name": "round-robin", "hw": dict(base_hw, routing="XY"),
     "partition": "round_robin", "placement": "identity"},
]
grid_path = workdir / "grid.json"
grid_path.write_text(json.dumps(grid, indent=2))

ranked = sweep(net_path, load_grid(grid_path), rank_by="composite", jobs=1,
               seed=3, duration=60, out_dir=workdir / "out")

print(f"{'rank':>4} {'point':>12} {'placement':>9} {'avg lat':>8} {'energy':>9} "
      f"{'ISI dist':>9} {'disorder':>9} {'thru':>7}")
for entry in ranked:
    m = entry["metrics"]
    print(f"{entry['rank']:>4} {entry['name']:>12} {entry['placement']:>9} "
          f"{m['avg_latency']:>8.2f} {m['energy']:>9.1f} "
          f"{m['isi_distortion']:>9.3f} {m['disorder']:>9.5f} {m['throughput']:>7.4f}")

print()
print(f"artifacts under {workdir}/out (results.json, summary.csv, per-point runs)")
print("note: at this low load all five routing algorithms tie on every metric, and")
print("this dense layer pair packs into two adjacent clusters, so swarm placement")
print("ties the row-major one. Scattering neurons round-robin is the one mapping")
print("that loses: it adds boundary traffic and measurable ISI distortion.")
