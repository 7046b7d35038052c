from __future__ import annotations

import logging

import numpy as np

from grid_model import AdmittanceMatrix, Grid
from power_flow import InjectionSet, PowerFlowOptions, PowerFlowSolution, solve_power_flow
from types_shared import SupplyTask, ViolationReport

logger = logging.getLogger(__name__)

BOX_SLACK = 1e-9


def injections_for(task: SupplyTask, p_set: np.ndarray, q_set: np.ndarray) -> InjectionSet:
    """Task injections with the controllable buses moved to the given setpoints."""

    base = InjectionSet(p=task.p_ref_array(), q=task.q_ref_array())
    return base.with_setpoints(task.controllable_ids(), np.asarray(p_set), np.asarray(q_set))


def curtailment_cost(grid: Grid, task: SupplyTask, p_set: np.ndarray) -> float:
    """Polynomial operating cost sum_i sum_k c_ik p_i^k over the controllable buses."""

    total = 0.0
    for box, p in zip(task.flex, np.asarray(p_set, dtype=float), strict=True):
        coeffs = grid.buses[box.bus].cost_coeffs
        total += float(sum(c * p**k for k, c in enumerate(coeffs)))
    return total


def excesses(grid: Grid, solution: PowerFlowSolution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-bus upper/lower band excesses and per-line loading excess, all >= 0."""

    vectors = grid.vectors()
    upper = np.maximum(solution.v_mag - vectors.v_max, 0.0)
    lower = np.maximum(vectors.v_min - solution.v_mag, 0.0)
    loading = np.maximum(solution.loading - 1.0, 0.0)
    return upper, lower, loading


def violation_report(grid: Grid, solution: PowerFlowSolution, tol: float = 1e-4) -> ViolationReport:
    if not solution.converged:
        return ViolationReport.non_physical_state(tol)
    upper, lower, loading = excesses(grid, solution)
    return ViolationReport.from_excesses(
        float(upper.max(initial=0.0)),
        float(lower.max(initial=0.0)),
        float(loading.max(initial=0.0)),
        v_min=float(solution.v_mag.min()),
        v_max=float(solution.v_mag.max()),
        max_loading=solution.max_loading,
        tolerance=tol,
    )


def _check_in_boxes(task: SupplyTask, p_set: np.ndarray, q_set: np.ndarray) -> None:
    p_min, p_max, q_min, q_max = task.flex_arrays()
    if p_set.shape != p_min.shape or q_set.shape != q_min.shape:
        raise ValueError(
            f"expected {p_min.size} setpoints per axis, got {p_set.size} and {q_set.size}"
        )
    outside = (
        (p_set < p_min - BOX_SLACK)
        | (p_set > p_max + BOX_SLACK)
        | (q_set < q_min - BOX_SLACK)
        | (q_set > q_max + BOX_SLACK)
    )
    if np.any(outside):
        buses = [task.flex[i].bus for i in np.flatnonzero(outside)]
        raise ValueError(f"setpoints outside the flexibility box at buses {buses}")


def evaluate_setpoints(
    grid: Grid,
    task: SupplyTask,
    p_set: np.ndarray,
    q_set: np.ndarray,
    tol: float = 1e-4,
    *,
    admittance: AdmittanceMatrix | None = None,
    pf_options: PowerFlowOptions | None = None,
    initial: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[PowerFlowSolution, ViolationReport]:
    p_set = np.asarray(p_set, dtype=float)
    q_set = np.asarray(q_set, dtype=float)
    _check_in_boxes(task, p_set, q_set)
    solution = solve_power_flow(
        grid,
        injections_for(task, p_set, q_set),
        pf_options,
        admittance=admittance,
        initial=initial,
    )
    if not solution.converged:
        logger.warning(f"Task {task.task_id}: power flow did not converge at the given setpoints")
    return solution, violation_report(grid, solution, tol)


def check_feasibility(
    grid: Grid,
    task: SupplyTask,
    p_set: np.ndarray,
    q_set: np.ndarray,
    tol: float = 1e-4,
    *,
    admittance: AdmittanceMatrix | None = None,
) -> ViolationReport:
    """Run a power flow with curtailed injections and report band/loading excesses.

    A diverged power flow is reported as non-physical, which counts as violating.
    """
    _, report = evaluate_setpoints(grid, task, p_set, q_set, tol, admittance=admittance)
    return report
