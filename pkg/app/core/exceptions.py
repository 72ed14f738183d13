"""
Exception hierarchy for the computation engine.
"""
from typing import Any, Optional


class ComputationError(Exception):
    """Base class for every failure raised by the engine."""


class PrecisionError(ComputationError):
    """Truncation window, exponent unit or invertibility violation."""


class ExpansionError(ComputationError):
    """A pole survived where the expansion must be regular."""


class BranchError(ComputationError):
    """A square root has no representable value or the hint is inconsistent."""


class ConventionError(ComputationError):
    """A structural cancellation that the conventions guarantee did not happen."""


class ParityViolation(ComputationError):
    """Odd root components survived the parity symmetrization."""


class SurfaceDataError(ComputationError):
    """Invalid surface input."""


class IdentityMismatch(ComputationError):
    """An asserted identity failed; carries the first differing coefficient."""

    def __init__(self, tag: str, index: Any = None, lhs: Optional[Any] = None, rhs: Optional[Any] = None):
        self.tag = tag
        self.index = index
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(f"{tag}: first mismatch at {index}: {lhs} != {rhs}")


class InvalidInputError(ComputationError, ValueError):
    """A requested order, flag or argument lies outside what the engine accepts."""
