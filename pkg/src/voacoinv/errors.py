"""Exception hierarchy shared by every engine."""


class VOAError(Exception):
    """Base class for all library errors."""


class DimensionError(VOAError, ValueError):
    """Vector or matrix shapes do not agree."""


class DomainError(VOAError, ValueError):
    """An operation was applied outside its mathematical domain."""


class InsufficientTruncation(VOAError):
    """A request needs data beyond the truncation that was built.

    ``needed`` is the truncation degree (or series order) that would make
    the request answerable, when it can be named.
    """

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed


class InsufficientPrecision(InsufficientTruncation):
    """A series coefficient lies beyond the known truncation order."""
