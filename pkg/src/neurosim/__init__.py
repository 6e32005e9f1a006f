"""Hardware-software co-simulation for spiking neural networks.

The pipeline: simulate a network in software to obtain exact spike times,
partition and place it onto a mesh of crossbars, replay the trace through a
cycle-accurate interconnect model, and quantify the hardware-induced
degradation (latency, energy, inter-spike-interval distortion, spike
disorder).
"""

from .errors import (
    CapacityExceeded,
    DeadlockDetected,
    DimensionMismatch,
    Infeasible,
    InsufficientSpikes,
    InvalidNetwork,
    InvalidPlacement,
    MismatchedClustering,
    NeurosimError,
    NonFiniteState,
    RangeError,
    SchemaError,
    VersionError,
)
from .hwconfig import EnergyTable, HardwareConfig
from .metrics import (
    HwReport,
    avg_isi,
    build_report,
    compute_energy,
    disorder_pair_count,
    spike_disorder,
)
from .network import Izhikevich, Lif, SnnNetwork, SpikeSource, SpikeTrace, Synapse
from .noc import (
    BackgroundTraffic,
    DeliveryLog,
    admissible_dirs,
    generate_route,
    ideal_network_sim,
    run_synthetic_traffic,
    simulate_hw,
)
from .partition import (
    ClusteredSnn,
    partition_greedy,
    partition_pso,
    partition_round_robin,
    random_feasible_assignment,
)
from .placement import (
    Placement,
    hop_cost,
    identity_placement,
    place_pso,
    random_placement,
    to_mapping_matrix,
    validate_mapping_matrix,
)
from .pso import PsoParams
from .simulate import simulate_software

__version__ = "0.1.0"

__all__ = [
    "BackgroundTraffic",
    "CapacityExceeded",
    "ClusteredSnn",
    "DeadlockDetected",
    "DeliveryLog",
    "DimensionMismatch",
    "EnergyTable",
    "HardwareConfig",
    "HwReport",
    "Infeasible",
    "InsufficientSpikes",
    "InvalidNetwork",
    "InvalidPlacement",
    "Izhikevich",
    "Lif",
    "MismatchedClustering",
    "NeurosimError",
    "NonFiniteState",
    "Placement",
    "PsoParams",
    "RangeError",
    "SchemaError",
    "SnnNetwork",
    "SpikeSource",
    "SpikeTrace",
    "Synapse",
    "VersionError",
    "admissible_dirs",
    "avg_isi",
    "build_report",
    "compute_energy",
    "disorder_pair_count",
    "generate_route",
    "hop_cost",
    "ideal_network_sim",
    "identity_placement",
    "partition_greedy",
    "partition_pso",
    "partition_round_robin",
    "place_pso",
    "random_feasible_assignment",
    "random_placement",
    "run_synthetic_traffic",
    "simulate_hw",
    "simulate_software",
    "spike_disorder",
    "to_mapping_matrix",
    "validate_mapping_matrix",
]
