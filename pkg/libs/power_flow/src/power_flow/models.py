from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import BaseModel, Field


class PowerFlowOptions(BaseModel):
    tolerance: float = Field(1e-8, gt=0.0, description="Max nodal mismatch (p.u.)")
    max_iterations: int = Field(30, ge=1, description="Newton iterations before giving up")
    flat_start: bool = Field(True, description="Start from 1.0∠0 instead of a given state")
    slack_voltage: float = Field(1.0, gt=0.0, description="Slack voltage magnitude (p.u.)")


@dataclass(frozen=True)
class InjectionSet:
    """Per-bus net injections, generation positive; slack entries are ignored."""

    p: np.ndarray
    q: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> InjectionSet:
        return cls(p=np.zeros(n), q=np.zeros(n))

    @classmethod
    def from_lists(cls, p: list[float], q: list[float]) -> InjectionSet:
        return cls(p=np.asarray(p, dtype=float), q=np.asarray(q, dtype=float))

    def with_setpoints(
        self, buses: np.ndarray | list[int], p_set: np.ndarray, q_set: np.ndarray
    ) -> InjectionSet:
        """Copy with the given buses overwritten."""

        p = np.array(self.p, dtype=float, copy=True)
        q = np.array(self.q, dtype=float, copy=True)
        p[buses] = p_set
        q[buses] = q_set
        return InjectionSet(p=p, q=q)


@dataclass(frozen=True)
class PowerFlowSolution:
    v_mag: np.ndarray
    v_ang: np.ndarray
    s_from: np.ndarray
    s_to: np.ndarray
    loading: np.ndarray
    converged: bool
    iterations: int
    max_mismatch: float
    p_calc: np.ndarray = field(default_factory=lambda: np.zeros(0))
    q_calc: np.ndarray = field(default_factory=lambda: np.zeros(0))
    singular: bool = False

    @property
    def losses(self) -> complex:
        return complex(np.sum(self.s_from + self.s_to))

    @property
    def max_loading(self) -> float:
        return float(np.max(self.loading)) if self.loading.size else 0.0


def solution_to_dict(solution: PowerFlowSolution) -> dict[str, Any]:
    """JSON-ready form; complex flows become ``[p, q]`` pairs."""

    def pairs(values: np.ndarray) -> list[list[float]]:
        return [[float(v.real), float(v.imag)] for v in values]

    return {
        "converged": solution.converged,
        "singular": solution.singular,
        "iterations": solution.iterations,
        "max_mismatch": float(solution.max_mismatch),
        "v_mag": [float(v) for v in solution.v_mag],
        "v_ang": [float(v) for v in solution.v_ang],
        "p_calc": [float(v) for v in solution.p_calc],
        "q_calc": [float(v) for v in solution.q_calc],
        "s_from": pairs(solution.s_from),
        "s_to": pairs(solution.s_to),
        "loading": [float(v) for v in solution.loading],
    }
