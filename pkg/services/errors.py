"""
Errors Module - Exception hierarchy shared by all services.

Every error raised on purpose by the library derives from BeamsplitterError,
so the command layer can map any of them to a single exit status.
"""


class BeamsplitterError(Exception):
    """Base class for library errors."""


class DomainError(BeamsplitterError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class DimensionError(BeamsplitterError, ValueError):
    """Matrix sizes do not fit the operation."""


class BranchError(BeamsplitterError, ArithmeticError):
    """A logarithm or arcsine left its principal branch."""


class OrthogonalityError(BeamsplitterError, ValueError):
    """The orthogonal-generator form of BCH was called on a non-orthogonal pair."""


class SizeError(BeamsplitterError, ValueError):
    """An enumeration would exceed its configured cap."""


class PreconditionError(BeamsplitterError, ValueError):
    """A theorem was invoked outside its hypotheses."""


class NormalizationError(BeamsplitterError, ValueError):
    """A generator with zero norm cannot be normalized."""


class BudgetError(BeamsplitterError, RuntimeError):
    """A word enumeration would evaluate more matrices than allowed."""
