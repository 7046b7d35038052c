from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .validator import Violation


class GridParseError(ValueError):
    """Raised when a grid file cannot be read or decoded."""


class GridValidationError(ValueError):
    """Raised when a decoded grid violates a structural invariant."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        reasons = "; ".join(f"{v.subject}: {v.reason}" for v in violations)
        super().__init__(reasons or "grid validation failed")
