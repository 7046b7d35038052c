from __future__ import annotations


class GridHashMismatchError(RuntimeError):
    """Raised when a checkpoint or dataset was built for another grid."""

    def __init__(self, artefact: str, expected: str, actual: str):
        self.artefact = artefact
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"{artefact} belongs to grid {expected[:12]}, loaded grid is {actual[:12]}"
        )
