"""
Exception hierarchy for the murmurations toolkit.

Every exception carries an ``exit_code`` that the command line maps directly
to its process status: 1 usage or domain errors, 2 data and ingestion errors,
3 numeric diagnostics (missed zeros, accuracy, failed verification).
"""

from typing import Optional


class MurmurationError(Exception):
    """Base class of all toolkit errors."""

    exit_code: int = 1


# Usage and domain errors


class UsageError(MurmurationError):
    """The command line was malformed."""


class BoundsError(MurmurationError, ValueError):
    """An argument lies outside the supported range."""


class DomainError(MurmurationError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ParityError(DomainError):
    """A formula restricted to one character parity received the other."""


class PreconditionError(MurmurationError, ValueError):
    """A documented precondition of the operation does not hold."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class WiringError(MurmurationError, ValueError):
    """Inputs that must refer to the same object do not."""


class EmptyFamilyError(MurmurationError, ValueError):
    """A family construction selected no members."""


# Data errors


class IngestionError(MurmurationError):
    """A data file could not be parsed or violates its contract."""

    exit_code = 2

    def __init__(
        self, message: str, path: Optional[str] = None, line: Optional[int] = None
    ):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class CoverageError(MurmurationError):
    """Zero data does not cover a requested truncation or histogram range."""

    exit_code = 2

    def __init__(self, message: str, member: Optional[str] = None):
        self.member = member
        super().__init__(message)


class OutputError(MurmurationError):
    """A result file could not be written."""

    exit_code = 2


# Numeric diagnostics


class NumericDiagnostic(MurmurationError):
    exit_code = 3


class AccuracyError(NumericDiagnostic):
    """Accuracy parameters are insufficient for the requested tolerance."""


class PhaseConventionError(NumericDiagnostic):
    """The Hardy Z rotation left a non-negligible imaginary part."""


class MissedZerosError(NumericDiagnostic):
    """The zero count disagrees with the counting function beyond slack."""


class DegenerateError(NumericDiagnostic):
    """A quantity that should be bounded away from zero vanished numerically."""


class ResolutionError(NumericDiagnostic):
    """A grid is too sparse for the requested local statistic."""


class VerificationFailure(NumericDiagnostic):
    """One or more acceptance checks failed."""


class InvariantViolation(NumericDiagnostic):
    """A mathematical invariant failed on a computed value."""
