from __future__ import annotations

from pydantic import BaseModel, Field

from opf_baseline import OpfOptions
from types_shared import SupplyTask, ViolationReport


class CurtailRequest(BaseModel):
    task: SupplyTask


class CurtailResponse(BaseModel):
    task_id: int
    p_set: list[float] = Field(..., description="Final active setpoints of the controllable buses")
    q_set: list[float] = Field(..., description="Final reactive setpoints of the controllable buses")
    reward: float
    violations: ViolationReport = Field(..., description="Grid state after the last action")
    inference_time: float = Field(..., ge=0.0, description="Actor evaluation time in seconds")
    steps: int


class OpfRequest(BaseModel):
    task: SupplyTask
    options: OpfOptions | None = None


class FeasibilityRequest(BaseModel):
    task: SupplyTask
    p_set: list[float]
    q_set: list[float]
    tol: float = Field(1e-4, gt=0.0)
