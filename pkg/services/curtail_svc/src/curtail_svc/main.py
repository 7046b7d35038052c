from __future__ import annotations

import logging
import os

import numpy as np
from fastapi import FastAPI, HTTPException

from grid_model import Grid, GridParseError, GridValidationError, grid_hash, load_grid
from neural_core import CheckpointFormatError
from opf_baseline import OpfSolution, check_feasibility, solve_opf
from rl_agent import CurtailmentEnv, DdpgAgent, EnvironmentStateError, load_agent, run_episode
from types_shared import SupplyTask, ViolationReport

from .models import CurtailRequest, CurtailResponse, FeasibilityRequest, OpfRequest

logging.basicConfig(level=os.getenv("CURTAIL_LOG_LEVEL", "INFO").upper())
logger = logging.getLogger(__name__)

app = FastAPI(title="Curtailment Service")

# Loaded on first use
_grid: Grid | None = None
_agent: tuple[DdpgAgent, dict] | None = None


def get_grid() -> Grid:
    global _grid
    if _grid is None:
        path = os.getenv("CURTAIL_GRID")
        if not path:
            raise HTTPException(status_code=503, detail="CURTAIL_GRID is not configured")
        try:
            _grid = load_grid(path)
        except (GridParseError, GridValidationError) as exc:
            logger.error(f"Cannot load grid {path}: {exc}")
            raise HTTPException(status_code=503, detail=f"Grid unavailable: {exc}") from exc
        logger.info(f"Loaded grid {path} with {_grid.n_buses} buses")
    return _grid


def get_agent(grid: Grid) -> tuple[DdpgAgent, dict]:
    global _agent
    if _agent is None:
        path = os.getenv("CURTAIL_CHECKPOINT")
        if not path:
            raise HTTPException(status_code=503, detail="CURTAIL_CHECKPOINT is not configured")
        try:
            agent, metadata = load_agent(path)
        except (CheckpointFormatError, OSError) as exc:
            logger.error(f"Cannot load checkpoint {path}: {exc}")
            raise HTTPException(status_code=503, detail=f"Checkpoint unavailable: {exc}") from exc
        if metadata.get("grid_hash") != grid_hash(grid):
            raise HTTPException(status_code=409, detail="Checkpoint was trained for another grid")
        logger.info(f"Loaded agent from {path} (step {metadata.get('step')})")
        _agent = (agent, metadata)
    return _agent


def _check_task(grid: Grid, task: SupplyTask) -> None:
    if len(task.p_ref) != grid.n_buses or len(task.q_ref) != grid.n_buses:
        raise HTTPException(
            status_code=400,
            detail=f"Task has {len(task.p_ref)} buses, grid has {grid.n_buses}",
        )
    if task.controllable_ids() != grid.controllable_ids:
        raise HTTPException(status_code=400, detail="Task boxes do not match the controllable buses")


@app.get("/healthz")
async def healthz() -> dict[str, str]:
    return {"status": "ok"}


@app.post("/curtail", response_model=CurtailResponse)
def curtail(request: CurtailRequest) -> CurtailResponse:
    """Run the agent greedily on the task and return its final setpoints."""
    grid = get_grid()
    agent, metadata = get_agent(grid)
    _check_task(grid, request.task)

    env = CurtailmentEnv(
        grid, float(metadata.get("reward_lambda", 2.0)), int(metadata.get("steps_per_task", 5))
    )
    try:
        result = run_episode(env, agent, request.task)
    except EnvironmentStateError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc

    logger.info(
        f"Task {request.task.task_id}: reward {result.final_reward:.3f}, "
        f"violating {result.final_report.has_violation}"
    )
    return CurtailResponse(
        task_id=request.task.task_id,
        p_set=result.p_set.tolist(),
        q_set=result.q_set.tolist(),
        reward=result.final_reward,
        violations=result.final_report,
        inference_time=result.inference_time,
        steps=len(result.rewards),
    )


@app.post("/opf", response_model=OpfSolution)
def opf(request: OpfRequest) -> OpfSolution:
    grid = get_grid()
    _check_task(grid, request.task)
    try:
        return solve_opf(grid, request.task, request.options)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.post("/feasibility", response_model=ViolationReport)
def feasibility(request: FeasibilityRequest) -> ViolationReport:
    grid = get_grid()
    _check_task(grid, request.task)
    try:
        return check_feasibility(
            grid, request.task, np.asarray(request.p_set), np.asarray(request.q_set), request.tol
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
