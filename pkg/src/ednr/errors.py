"""Exception hierarchy shared across the package.

Every error raised by the library derives from EdnrError so callers (and the
CLI) can catch validation problems without swallowing genuine bugs.
"""


class EdnrError(Exception):
    """Base class for all library errors."""


class Disconnected(EdnrError):
    """The input graph does not connect all vertices."""


class DuplicateEdge(EdnrError):
    """The same unordered vertex pair appears twice in the edge list."""


class SelfLoop(EdnrError):
    """An edge joins a vertex to itself."""


class NegativeValue(EdnrError):
    """A demand or resistance is negative."""


class RootDemandPresent(EdnrError):
    """A demand was supplied for the root vertex."""


class NotAGrid(EdnrError):
    """A grid-only operation was applied to a non-grid instance."""


class ParseError(EdnrError):
    """Malformed serialized instance or tree."""


class NotSpanning(EdnrError):
    """An edge set does not form a spanning tree of the instance."""


class InvalidShape(EdnrError):
    """Grid shape outside the supported range."""


class MergeInfeasible(EdnrError):
    """The two minimum-size subtrees of a level are not mergeable in the grid."""


class ZeroMinDemand(EdnrError):
    """Non-uniform evaluation requires strictly positive demands."""


class BetaAbsent(EdnrError):
    """A split-index-dependent bound was requested but no split index exists."""


class CapExceeded(EdnrError):
    """Brute-force enumeration was asked to exceed its configured cap."""


class TooLarge(EdnrError):
    """Instance has more spanning trees than the enumeration limit."""


class WindowViolated(EdnrError):
    """A 3-partition value falls outside the strict (S/4n, S/2n) window."""


class NonDivisible(EdnrError):
    """3-partition total is not divisible by the group count: trivial NO."""


class NotAPartition(EdnrError):
    """The given groups do not partition the item index set."""


class Unbalanced(EdnrError):
    """A group's total differs from the required per-group total."""


class RoutingFailed(EdnrError):
    """The witness-tree router could not realize the requested layout."""
