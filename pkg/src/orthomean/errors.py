"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class OrthomeanError(Exception):
    exit_code = 3


class ConfigurationError(OrthomeanError, ValueError):
    """Invalid parameter, malformed config file or unsupported combination."""

    exit_code = 2


class ValidationError(ConfigurationError):
    """Input data (coefficient table, sigma sequence) violates an invariant."""


class DomainError(ConfigurationError):
    """Arguments outside the domain where a closed form is defined."""


class NumericError(OrthomeanError, ArithmeticError):
    exit_code = 3

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InternalConsistencyError(NumericError):
    """Two independent computations of the same quantity disagree."""


class RegularityError(OrthomeanError):
    """A summation method violates nonnegativity or unit row sums."""

    exit_code = 1

    def __init__(self, message: str, n: int, k: int | None = None, condition: str = ""):
        super().__init__(message)
        self.n = n
        self.k = k
        self.condition = condition
