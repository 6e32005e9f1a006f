"""Exception types shared across the toolkit."""


class NeurosimError(Exception):
    """Base class for every error raised by this package."""


class InvalidNetwork(NeurosimError):
    """Network description violates a structural invariant (dangling ids, bad delay, ...)."""


class NonFiniteState(NeurosimError):
    """Neuron state diverged to inf/nan; parameters are unstable at the fixed timestep."""


class SchemaError(NeurosimError):
    """A file does not match its expected schema.

    ``field`` names the offending entry so callers can point users at it.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field is not None:
            message = f"{message} (field: {field})"
        super().__init__(message)


class VersionError(SchemaError):
    """File carries an unknown format version."""


class RangeError(SchemaError):
    """A value is syntactically valid but outside its allowed range."""


class Infeasible(NeurosimError):
    """No clustering/placement satisfies the capacity constraints.

    Raise the crossbar capacity or the mesh size.
    """


class MismatchedClustering(NeurosimError):
    """Placement and clustering disagree (cluster counts, duplicate crossbars, ...)."""


class InvalidPlacement(MismatchedClustering):
    """Placement itself is malformed (coordinates outside mesh, non-injective)."""


class DeadlockDetected(NeurosimError):
    """No packet moved for the stall window; indicates a routing/turn-model bug."""


class CapacityExceeded(NeurosimError):
    """Trace references neurons that the mapping does not cover."""


class DimensionMismatch(NeurosimError):
    """Rate vectors of unequal length."""


class InsufficientSpikes(NeurosimError):
    """Fewer than two spikes: the inter-spike interval is undefined, not zero."""
