"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PrivargError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(PrivargError):
    """A domain object was built from inconsistent or out-of-range data."""


class ConfigError(PrivargError):
    """A configuration file or option set could not be applied."""


class ParseError(PrivargError):
    """A text artifact could not be parsed.

    Carries the one-based line number when the failing line is known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ProtocolViolationError(PrivargError):
    """A move was rejected by the dispute protocol."""


class EngineInvariantError(PrivargError):
    """The dispute engine detected an internal inconsistency."""


class ResourceLimitError(PrivargError):
    """A configured resource budget was exceeded."""
