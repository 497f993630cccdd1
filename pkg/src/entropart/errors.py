"""Exception types for the library's documented error contracts.

Every error carries a CLI exit code: 2 for rejected input, 3 for a broken
internal invariant (a bug, not a usage problem).
"""


class EntropartError(Exception):
    exit_code = 2


class InternalError(EntropartError):
    exit_code = 3


# graph construction and queries
class IndexOutOfRange(EntropartError):
    pass


class DuplicateEdge(EntropartError):
    pass


class NonFiniteWeight(EntropartError):
    pass


class SelfLoopNotAllowed(EntropartError):
    pass


class NotDirected(EntropartError):
    """A directed graph was required."""


class NotUndirected(EntropartError):
    """An undirected graph was required."""


# entropy evaluation
class NonPositiveWeight(EntropartError):
    pass


class EmptyGraph(EntropartError):
    """Graph volume is zero; entropy is undefined."""


class RootHasNoAssignedEntropy(EntropartError):
    pass


class TooLarge(EntropartError):
    """Input exceeds the exhaustive-search guard."""


# similarity and filtration
class ZeroVariance(EntropartError):
    def __init__(self, row: int):
        super().__init__(f"embedding row {row} has zero variance")
        self.row = row


class AlreadyReweighted(EntropartError):
    pass


class KOutOfRange(EntropartError):
    pass


# tree optimization
class LeafNotStretchable(EntropartError):
    pass


class InvalidLayer(EntropartError):
    pass


# directed entropy
class SingularSystem(InternalError):
    """Stationary solve failed on supposedly strongly connected input."""


# abstraction
class DimensionMismatch(EntropartError):
    pass


class InvalidDepth(EntropartError):
    pass


class SupportMismatch(EntropartError):
    pass


# skill pipeline
class UnmappedId(EntropartError):
    pass


class UnknownAbstractState(EntropartError):
    pass
