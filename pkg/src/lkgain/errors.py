"""Exception types shared across the package."""


class LkgainError(Exception):
    """Base class for all package-specific errors."""


class MalformedHeader(LkgainError):
    """TSPLIB header is missing required keys or contains unusable values."""


class UnsupportedWeightType(LkgainError):
    """EDGE_WEIGHT_TYPE (or EDGE_WEIGHT_FORMAT) is outside the supported subset."""


class DimensionMismatch(LkgainError):
    """Declared DIMENSION disagrees with the file body, or is below the minimum."""


class NonSymmetricMatrix(LkgainError):
    """An explicit full matrix is not symmetric."""


class NonPositiveCost(LkgainError):
    """An explicit matrix carries a zero or negative off-diagonal cost."""


class IndexOutOfRange(LkgainError):
    """A vertex index lies outside 1..n."""


class SelfLoop(LkgainError):
    """An edge query was made with identical endpoints."""


class NotAPermutation(LkgainError):
    """A vertex sequence is not a permutation of 1..n."""


class VerticesNotDistinct(LkgainError):
    """An orientation query requires three distinct vertices."""


class PathInconsistent(LkgainError):
    """Deleted/added edge lists do not describe a coherent exchange."""


class MoveInfeasible(LkgainError):
    """Applying the exchange would split the tour into several cycles."""


class TreeInconsistent(LkgainError):
    """A one-tree does not have the structure alpha computation relies on."""


class StepIndexInvalid(LkgainError):
    """A gain-criterion query used a step index below 1."""


class InstanceTooLarge(LkgainError):
    """The instance exceeds the size bound of an exact oracle."""


class NoRunCompleted(LkgainError):
    """The time limit expired before any run finished a single trial."""
