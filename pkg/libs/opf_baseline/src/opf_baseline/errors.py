from __future__ import annotations


class BruteForceLimitError(ValueError):
    """Raised when exhaustive search is asked for too many controllable buses."""
