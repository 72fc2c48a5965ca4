"""Exception types shared across the toolkit."""


class RoydenError(Exception):
    """Base class for all toolkit errors."""


class GraphError(RoydenError, ValueError):
    """Invalid graph construction or use."""


class SelfLoopError(GraphError):
    """An edge joins a vertex to itself."""


class DuplicateEdgeError(GraphError):
    """The same undirected edge appears more than once (strict mode)."""


class DisconnectedGraphError(GraphError):
    """The edge list does not describe a connected graph."""


class VertexIdError(GraphError):
    """Vertex ids are not the dense range 0..n-1."""


class UnsupportedFamilyError(RoydenError, ValueError):
    """Family tag outside the fixed menu (z, z2, z3, tree:<d>)."""


class NonIncreasingRadiiError(RoydenError, ValueError):
    """Exhaustion radii must be strictly increasing."""


class TooManyPathsError(RoydenError, RuntimeError):
    """Simple-path enumeration exceeded its cap."""


class MissingValueError(RoydenError, KeyError):
    """A vertex function is evaluated outside its domain."""


class DomainMismatchError(RoydenError, ValueError):
    """Two vertex functions live on incompatible domains."""


class EmptyBoundaryError(RoydenError, ValueError):
    """A Dirichlet problem was posed with an empty outer boundary."""


class SingularSystemError(RoydenError, RuntimeError):
    """The linear solve hit a (theoretically impossible) singular pivot."""


class TooFewPointsError(RoydenError, ValueError):
    """Classification requested on a capacity sequence that is too short."""


class EmptyOuterBoundaryError(RoydenError, ValueError):
    """Inner-potential region has no outer boundary in the ambient ball."""


class OverlappingDirectionsError(RoydenError, ValueError):
    """Probe direction specs select overlapping shell vertices."""


class CutBudgetExceededError(RoydenError, RuntimeError):
    """Cutting-plane solver ran out of its cut budget before closing the gap."""


class SerializationError(RoydenError, ValueError):
    """Report emission failed (non-finite value or malformed row)."""


class UsageError(RoydenError, ValueError):
    """Command-line arguments could not be validated."""


class DuplicateEdgeWarning(UserWarning):
    """Duplicate undirected edges were collapsed during graph construction."""
