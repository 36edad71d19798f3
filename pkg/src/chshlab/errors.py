"""Exception types shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """Input violates a documented invariant."""


class RangeError(ValidationError):
    """Scalar argument outside its admissible interval."""


class ImpossibleValueError(ValidationError):
    """A CHSH value above the algebraic maximum of 4 (an upstream bug)."""
