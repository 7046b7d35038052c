from __future__ import annotations

import logging

from grid_model import Grid, build_admittance, grid_hash
from opf_baseline import violation_report
from power_flow import InjectionSet, solve_power_flow
from types_shared import SupplyTask

from .errors import ScenarioConfigError
from .models import Dataset, DatasetDiagnostics

logger = logging.getLogger(__name__)


def check_grid(grid: Grid, dataset: Dataset) -> str:
    digest = grid_hash(grid)
    if dataset.grid_hash != digest:
        raise ScenarioConfigError(
            f"dataset belongs to grid {dataset.grid_hash[:12]}, got grid {digest[:12]}"
        )
    return digest


def _count(tasks: list[SupplyTask], diagnostics: DatasetDiagnostics) -> DatasetDiagnostics:
    labels = [task.labels for task in tasks if task.labels is not None]
    return diagnostics.model_copy(
        update={
            "violating": sum(label.has_violation for label in labels),
            "upper_voltage": sum(label.upper_voltage for label in labels),
            "lower_voltage": sum(label.lower_voltage for label in labels),
            "overload": sum(label.overload for label in labels),
        }
    )


def label_violations(grid: Grid, dataset: Dataset, tol: float = 1e-4) -> Dataset:
    """Attach the uncurtailed-state ViolationReport to every task.

    Tasks whose power flow diverges are dropped from the returned dataset and
    recorded in ``diagnostics.non_physical``/``non_physical_tasks``. Existing
    labels are overwritten.
    """
    check_grid(grid, dataset)
    admittance = build_admittance(grid)
    kept: list[SupplyTask] = []
    dropped: list[int] = []
    for task in dataset.tasks:
        solution = solve_power_flow(
            grid,
            InjectionSet(p=task.p_ref_array(), q=task.q_ref_array()),
            admittance=admittance,
        )
        if not solution.converged:
            logger.warning(f"Task {task.task_id}: power flow diverged, excluded as non-physical")
            dropped.append(task.task_id)
            continue
        kept.append(task.model_copy(update={"labels": violation_report(grid, solution, tol)}))

    previous = dataset.diagnostics
    diagnostics = _count(
        kept,
        previous.model_copy(
            update={
                "non_physical": previous.non_physical + len(dropped),
                "non_physical_tasks": previous.non_physical_tasks + dropped,
            }
        ),
    )
    logger.info(
        f"Labelled {len(kept)} tasks: {diagnostics.violating} violating "
        f"({diagnostics.upper_voltage} upper, {diagnostics.lower_voltage} lower, "
        f"{diagnostics.overload} overload), {len(dropped)} non-physical"
    )
    return dataset.model_copy(update={"tasks": kept, "diagnostics": diagnostics})


def select_violating(dataset: Dataset) -> Dataset:
    """Keep only labelled tasks with at least one violation."""

    if not dataset.labelled:
        raise ScenarioConfigError("dataset must be labelled before filtering")
    tasks = dataset.violating_tasks()
    return dataset.model_copy(
        update={"tasks": tasks, "diagnostics": _count(tasks, dataset.diagnostics)}
    )
