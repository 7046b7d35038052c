from __future__ import annotations


class ShapeMismatchError(ValueError):
    """Raised when arrays do not chain with a network's layer sizes."""


class CacheMismatchError(ValueError):
    """Raised when a forward cache does not belong to the parameters passed to backward."""


class CheckpointFormatError(ValueError):
    """Raised for unreadable or incompatible checkpoint files."""
