"""Population-and-projection front end for the neurosim backend.

Build networks in a scripting session, emit the backend's network file
format, and run simulations through its command line. The boundary is
deliberately file-and-subprocess only: this package shares no code with the
simulator, so anything it produces is valid input for any tool speaking the
same formats.
"""

from .builder import (
    AllToAll,
    BackendError,
    BackendNotFound,
    BuildError,
    FixedProbability,
    Network,
    OneToOne,
    Population,
    Projection,
    SimulationResult,
)

__version__ = "0.1.0"

__all__ = [
    "AllToAll",
    "BackendError",
    "BackendNotFound",
    "BuildError",
    "FixedProbability",
    "Network",
    "OneToOne",
    "Population",
    "Projection",
    "SimulationResult",
]
