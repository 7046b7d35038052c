from __future__ import annotations

import itertools
import logging
import time

import numpy as np

from grid_model import Grid, build_admittance
from types_shared import SupplyTask

from .errors import BruteForceLimitError
from .feasibility import curtailment_cost
from .models import OpfOptions, OpfSolution
from .penalty import SetpointProblem

logger = logging.getLogger(__name__)

MAX_CONTROLLABLE = 2
MIN_POINTS = 11


def _axis(low: float, high: float, points: int) -> np.ndarray:
    if high - low <= 0.0:
        return np.array([low])
    return np.linspace(low, high, points)


def _point(axes: list[np.ndarray], index: tuple[int, ...]) -> np.ndarray:
    return np.array([axis[i] for axis, i in zip(axes, index, strict=True)], dtype=float)


def brute_force_opf(
    grid: Grid,
    task: SupplyTask,
    grid_points_per_axis: int = 101,
    opts: OpfOptions | None = None,
) -> OpfSolution:
    """Exhaustive search over the Cartesian grid of all (P, Q) boxes.

    Active-power combinations are visited in order of increasing cost (ties
    by grid index) and, for each, reactive combinations in lexicographic
    index order. The first feasible point is therefore the minimum-cost one
    with the lexicographically smallest index among equal costs. Degenerate
    axes contribute a single point.
    """
    opts = opts or OpfOptions()
    k = len(task.flex)
    if k > MAX_CONTROLLABLE:
        raise BruteForceLimitError(f"brute force limited to k ≤ {MAX_CONTROLLABLE}, got k={k}")
    if grid_points_per_axis < MIN_POINTS:
        raise ValueError(f"grid_points_per_axis must be >= {MIN_POINTS}")

    started = time.perf_counter()
    problem = SetpointProblem(grid, task, opts, build_admittance(grid))
    p_min, p_max, q_min, q_max = task.flex_arrays()
    p_axes = [_axis(lo, hi, grid_points_per_axis) for lo, hi in zip(p_min, p_max, strict=True)]
    q_axes = [_axis(lo, hi, grid_points_per_axis) for lo, hi in zip(q_min, q_max, strict=True)]

    p_combos = []
    for idx in itertools.product(*(range(axis.size) for axis in p_axes)):
        p_combos.append((curtailment_cost(grid, task, _point(p_axes, idx)), idx))
    p_combos.sort(key=lambda item: (item[0], item[1]))
    q_indices = list(itertools.product(*(range(axis.size) for axis in q_axes)))

    for _, p_idx in p_combos:
        p = _point(p_axes, p_idx)
        for q_idx in q_indices:
            q = _point(q_axes, q_idx)
            evaluation = problem.evaluate(np.concatenate([p, q]))
            if evaluation.converged and evaluation.worst_excess <= opts.feasibility_tol:
                logger.debug(
                    f"Task {task.task_id}: brute force feasible after {problem.evaluations} points"
                )
                return problem.result(time.perf_counter() - started)

    logger.info(f"Task {task.task_id}: brute force found no feasible point")
    return problem.result(time.perf_counter() - started)
