"""Errors raised by the simulator library."""
from __future__ import annotations

from typing import Optional, Sequence


class QuantumError(Exception):
    """Base class for every simulator error."""


class DimensionError(QuantumError):
    """Layouts or matrix shapes do not match."""


class SizeError(QuantumError):
    """A space would exceed the configured dimension cap."""


class NormalizationError(QuantumError):
    """A ket required to be normalized is not."""

    def __init__(self, message: str, norm: Optional[float] = None):
        super().__init__(message)
        self.norm = norm


class InvalidObservableError(QuantumError):
    """Projectors are not complete, orthogonal, or labels repeat."""

    def __init__(self, message: str, violations: Sequence[str] = ()):
        super().__init__(message)
        self.violations = list(violations)


class IncompatibleObservablesError(QuantumError):
    """Two observables cannot be measured jointly (shared target or non-commuting)."""


class ImpossibleOutcomeError(QuantumError):
    """A forced outcome has probability zero along the chosen sequence."""

    def __init__(self, message: str, step: Optional[int] = None,
                 event_id: Optional[str] = None, ordering: Optional[Sequence[str]] = None):
        super().__init__(message)
        self.step = step
        self.event_id = event_id
        self.ordering = list(ordering) if ordering is not None else None


class UnreachablePostSelectionError(QuantumError):
    """The post-selected state cannot be reached through the requested measurement."""


class UndefinedWeakValueError(QuantumError):
    """Pre- and post-selected states are orthogonal, so the weak value has no meaning."""


class ScenarioValidationError(QuantumError):
    """A scenario document or object fails validation; messages carry document paths."""

    def __init__(self, message: str, errors: Sequence[str] = ()):
        super().__init__(message)
        self.errors = list(errors)

    def __str__(self):
        if not self.errors:
            return super().__str__()
        return f"{super().__str__()}: " + "; ".join(self.errors)


class InvalidOrderingError(QuantumError):
    """An ordering is not a permutation of the scenario's events, or an event lacks an outcome."""
