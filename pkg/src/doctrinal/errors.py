"""Exception hierarchy shared by the library and the command line."""


class DoctrinalError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DoctrinalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapabilityError(DoctrinalError):
    """The request is well formed but the library deliberately does not support it."""


class NotAttainedError(DoctrinalError):
    """A search terminated at its cap without reaching the target."""

    def __init__(self, message, cap):
        super().__init__(message)
        self.cap = cap
