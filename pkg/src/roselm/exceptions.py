"""Exception types raised across the package.

All inherit from ValueError so callers that only care about "bad input or
state" can catch one base class, while tests can pin the precise failure.
"""


class DimensionMismatchError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class RankDeficientError(ValueError):
    """A pseudoinverse could not be produced with finite entries."""


class NotPositiveDefiniteError(ValueError):
    """Cholesky factorization hit a non-positive pivot."""


class InnerSolveError(ValueError):
    """The (I + H P H^T) solve inside a recursive update is singular."""


class IllConditionedError(ValueError):
    """A correlation matrix is too ill-conditioned to invert reliably."""


class InsufficientInitDataError(ValueError):
    """The initialization chunk has fewer rows than hidden nodes."""


class EmptySelectionError(ValueError):
    """An ensemble combination was requested over an empty member set."""


class ParseError(ValueError):
    """A delimited data file contains a cell that cannot be parsed."""


class SchemaMismatchError(ValueError):
    """A data file does not match the declared column schema."""


class DegenerateColumnError(ValueError):
    """A column is constant, so a min-max normalization map is singular."""
