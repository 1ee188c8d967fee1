"""Exception types shared across the library."""


class RelumeshError(Exception):
    """Base class for all library errors."""


class NetworkFormatError(RelumeshError):
    """Malformed or inconsistent network file."""


class ShapeMismatchError(NetworkFormatError):
    """Layer dimensions do not chain; message names the offending layer."""


class UnsupportedActivationError(NetworkFormatError):
    """Activation tag is unknown or a hidden layer is tagged linear."""


class DegenerateKnotError(RelumeshError):
    """Surrogate domain spans fewer than two knots."""


class TopologyError(RelumeshError):
    """Plane/polyhedron intersection edges failed to close into one loop."""


class MemoryBudgetError(RelumeshError):
    """Live cell state exceeded the configured memory budget."""

    def __init__(self, msg, layer_reached=None):
        super().__init__(msg)
        self.layer_reached = layer_reached


class NonPlanarFaceError(RelumeshError):
    """Polygon face deviates from its plane beyond tolerance."""


class EmptyMeshError(RelumeshError):
    """Operation requires a non-empty mesh."""


class AllPointsDivergedError(RelumeshError):
    """Every reference point failed to project onto the zero set."""


class DegenerateTriangleError(RelumeshError):
    """Triangle with (near-)zero area; message names the index."""
