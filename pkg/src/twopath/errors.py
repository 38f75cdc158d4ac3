"""Exception types shared across the package."""


class TwoPathError(Exception):
    """Base class for all package errors."""


class GraphError(TwoPathError):
    """Invalid graph construction or structure."""


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class NotADag(GraphError):
    pass


class NotATree(GraphError):
    pass


class NoSinks(GraphError):
    """Every vertex has an out-edge, so sink-based quantities are undefined."""


class GraphFileError(TwoPathError):
    """Malformed graph file."""


class TooLargeForExact(TwoPathError):
    """Instance exceeds the size cap of an exact (exponential) computation."""


class InvalidParams(TwoPathError):
    """Generator parameters violate their constraints."""


class MonotoneRejectionExhausted(TwoPathError):
    """Rejection sampling failed to find a monotone DAG within the budget."""
