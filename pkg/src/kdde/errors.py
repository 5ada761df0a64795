"""Exception types shared across the toolkit.

All failures raised by kdde derive from :class:`KddeError` so callers can
catch the whole family.  The CLI maps subfamilies to exit codes (see
``kdde.cli``): numerical failures such as :class:`SingularGram` and
:class:`DegenerateInput` exit with code 4, IO problems with 3, bad usage
with 2.
"""


class KddeError(Exception):
    """Base class for all kdde errors."""


class DimensionMismatch(KddeError):
    """Input vector/matrix has the wrong dimension for the operation."""


class NonFiniteInput(KddeError):
    """An input contains NaN or Inf where finite values are required."""


class DegenerateBounds(KddeError):
    """A bounding box has a zero-length side."""


class SchemaError(KddeError):
    """A weight/config file does not match the expected schema."""


class DegenerateInput(KddeError):
    """Point set is affinely dependent; no full-dimensional mesh exists."""


class TooFewPoints(KddeError):
    """Fewer than n+1 points after deduplication; cannot triangulate."""


class MeshDataMismatch(KddeError):
    """Mesh node count does not match the (deduplicated) dataset size."""


class SingularGram(KddeError):
    """Gram matrix is numerically singular and no ridge was requested."""


class NotStateInclusive(KddeError):
    """Dictionary has no state block; raw-state read-out is impossible."""


class EmptyDataset(KddeError):
    """Operation requires a nonempty transition dataset."""


class DatasetSpecError(KddeError):
    """A dataset specification is internally inconsistent."""
