"""Exception hierarchy shared by all ttnmin modules."""


class TTNError(Exception):
    """Base class for every error raised by ttnmin."""


class TopologyError(TTNError, ValueError):
    """The vertex/edge data does not describe a valid tree."""


class CycleDetected(TopologyError):
    pass


class Disconnected(TopologyError):
    pass


class NonPositiveDimension(TopologyError):
    pass


class DuplicateEdge(TopologyError):
    pass


class UnknownVertex(TopologyError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class AxisMismatch(TTNError, ValueError):
    """Axis labels do not match what the operation requires."""


class ShapeMismatch(TTNError, ValueError):
    """Array shapes are incompatible."""


class NonFiniteEntries(TTNError, ValueError):
    pass


class MemoryBudgetExceeded(TTNError, MemoryError):
    """A contraction would materialize more scalars than the budget allows."""


class InconsistencyDetected(TTNError):
    """Local minimality certificate and global edge-cut ranks disagree.

    Attributes:
        edges: the offending edges as canonical ``(u, v)`` pairs.
        report: the :class:`~ttnmin.network.RankReport` gathered before failing.
    """

    def __init__(self, message, edges=(), report=None):
        super().__init__(message)
        self.edges = list(edges)
        self.report = report
