class SieveError(Exception):
    """Base class for errors raised by segfactor."""


class DomainError(SieveError, ValueError):
    """An argument is outside the domain an operation accepts."""


class CapacityError(SieveError, OverflowError):
    """A fixed-width structure has no room for another entry."""


class CorruptionError(SieveError):
    """Internal state contradicts its own invariants."""


class SinkError(SieveError):
    """The factorization consumer failed; ``summary`` holds partial progress."""

    def __init__(self, message, summary):
        super().__init__(message)
        self.summary = summary
