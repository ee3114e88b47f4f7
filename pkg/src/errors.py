"""
Exception hierarchy for the QBZZB library.

Library modules raise these; the CLI maps them onto exit codes.
"""
from typing import Optional


class QBZZBError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(QBZZBError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 3


class IllConditionedPriorError(DomainError):
    """Prior covariance is not symmetric positive definite within tolerance."""


class DimensionMismatchError(DomainError):
    """Vectors, matrices or spectra disagree on the parameter dimension K."""


class ContractViolation(QBZZBError):
    """A caller-supplied object broke the contract of an operation."""

    exit_code = 3


class InputParseError(QBZZBError):
    """An input file could not be parsed or failed schema validation."""

    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.path = path
        self.line = line
        self.column = column
        location = ""
        if path is not None:
            location = str(path)
            if line is not None:
                location += f":{line}"
                if column is not None:
                    location += f":{column}"
            location += ": "
        super().__init__(f"{location}{message}")


class VerificationFailure(QBZZBError):
    """At least one oracle report failed to dominate its bound."""

    exit_code = 4
