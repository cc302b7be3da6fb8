"""Error hierarchy shared across the package.

Exit-code policy for the command line (see :mod:`hyperrec.cli`):

* checks ran but some failed            -> exit 1
* bad usage / invalid inputs            -> exit 2
* resource or resolution limits reached -> exit 3
"""


class HyperrecError(Exception):
    """Base class for all package errors."""


class UsageError(HyperrecError):
    """Invalid input that a caller could have validated up front."""


class InvalidSeedError(UsageError):
    """Seed word rejected (empty, non-binary, or without a single 1)."""


class InvalidCylinderError(UsageError):
    """A cylinder word that does not occur in any available language."""


class UnsupportedDirectionError(UsageError):
    """Backward iteration requested on a system without an inverse."""


class InvalidCocycleError(UsageError):
    """A circle cocycle whose lift does not close up to an integer degree."""


class CapacityError(HyperrecError):
    """A construction would exceed the configured resource budget."""

    def __init__(self, message: str, required: int | None = None, budget: int | None = None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class InsufficientDepthError(CapacityError):
    """A certified enclosure is wider than the requested tolerance.

    ``needed`` carries the smallest truncation index that would suffice,
    when one exists.
    """

    def __init__(self, message: str, needed: int | None = None):
        super().__init__(message)
        self.needed = needed


class TruncationArtifactError(CapacityError):
    """The requested horizon can only produce artifacts of the truncation.

    Raised instead of reporting a spurious exact recurrence that the
    untruncated system does not have.
    """
