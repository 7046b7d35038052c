from __future__ import annotations


class EnvironmentStateError(RuntimeError):
    """Raised when the environment is used out of order or cannot represent a task."""


class ReplayBufferError(RuntimeError):
    """Raised when sampling more experiences than the buffer can provide."""


class NonFiniteLossError(RuntimeError):
    """Raised when a DDPG update produces a non-finite loss or gradient."""

    def __init__(self, message: str, diagnostics: dict[str, float] | None = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}
