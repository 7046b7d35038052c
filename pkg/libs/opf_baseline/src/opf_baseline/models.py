from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from power_flow import PowerFlowOptions
from types_shared import ViolationReport


class OpfOptions(BaseModel):
    """Penalty schedule and tolerances of the reduced-space OPF."""

    penalty_start: float = Field(1e2, gt=0.0, description="First penalty weight")
    penalty_growth: float = Field(10.0, gt=1.0, description="Weight multiplier per outer iteration")
    penalty_weights: list[float] | None = Field(
        default=None, description="Explicit weight schedule; overrides start/growth"
    )
    max_outer_iterations: int = Field(6, ge=1)
    max_inner_iterations: int = Field(100, ge=1)
    feasibility_tol: float = Field(1e-4, gt=0.0, description="Excess tolerated as feasible")
    fd_step: float = Field(1e-6, gt=0.0, description="Central finite-difference step (p.u.)")
    power_flow: PowerFlowOptions = Field(default_factory=PowerFlowOptions)

    @model_validator(mode="after")
    def _check_schedule(self) -> OpfOptions:
        if self.penalty_weights is not None:
            if not self.penalty_weights or any(w <= 0 for w in self.penalty_weights):
                raise ValueError("penalty_weights must be a non-empty list of positive values")
        return self

    def schedule(self) -> list[float]:
        if self.penalty_weights is not None:
            return list(self.penalty_weights)[: self.max_outer_iterations]
        return [
            self.penalty_start * self.penalty_growth**i for i in range(self.max_outer_iterations)
        ]


class OpfSolution(BaseModel):
    buses: list[int] = Field(default_factory=list, description="Controllable bus ids")
    p_set: list[float] = Field(default_factory=list, description="Active setpoints (p.u.)")
    q_set: list[float] = Field(default_factory=list, description="Reactive setpoints (p.u.)")
    objective: float = Field(..., description="Polynomial cost at p_set")
    feasible: bool
    violation_report: ViolationReport
    solve_time: float = Field(0.0, ge=0.0, description="Wall-clock seconds")
    evaluations: int = Field(0, ge=0, description="Power flows run")
    diagnostic: str = Field("", description="Empty on success")
    task_id: int | None = None
