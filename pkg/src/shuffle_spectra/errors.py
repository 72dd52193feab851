"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: DomainError -> 1 (bad input),
ResourceLimitError -> 2, NumericError -> 3.
"""


class ShuffleSpectraError(Exception):
    """Base class for all package errors."""


class DomainError(ShuffleSpectraError, ValueError):
    """A precondition on an argument was violated."""


class ResourceLimitError(ShuffleSpectraError):
    """A desk-scale guard was exceeded; the message names the bound."""


class NumericError(ShuffleSpectraError):
    """An iterative numeric routine failed to converge."""
