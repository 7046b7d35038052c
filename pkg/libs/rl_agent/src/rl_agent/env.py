"""Partially observable curtailment environment.

The agent sees (P, Q, V) at the observable buses and the flexibility boxes
of the controllable ones; the reward is computed from the full grid state.
One episode presents the same supply task ``steps_per_task`` times and the
setpoints chosen at one step stay applied until the next action.
"""

from __future__ import annotations

import logging
from typing import Any

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from grid_model import Grid, build_admittance
from opf_baseline import injections_for, violation_report
from power_flow import InjectionSet, PowerFlowOptions, PowerFlowSolution, solve_power_flow
from types_shared import SupplyTask

from .errors import EnvironmentStateError
from .reward import compute_reward

logger = logging.getLogger(__name__)


def action_to_setpoints(task: SupplyTask, action: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map ``[a_p..., a_q...]`` in [-1, 1] affinely onto the task's boxes."""

    k = len(task.flex)
    a = np.clip(np.asarray(action, dtype=float).reshape(-1), -1.0, 1.0)
    if a.size != 2 * k:
        raise EnvironmentStateError(f"expected an action of length {2 * k}, got {a.size}")
    p_min, p_max, q_min, q_max = task.flex_arrays()
    p_set = p_min + (a[:k] + 1.0) / 2.0 * (p_max - p_min)
    q_set = q_min + (a[k:] + 1.0) / 2.0 * (q_max - q_min)
    return p_set, q_set


def setpoints_to_action(task: SupplyTask, p_set: np.ndarray, q_set: np.ndarray) -> np.ndarray:
    """Inverse of :func:`action_to_setpoints`; degenerate axes map to +1."""

    p_min, p_max, q_min, q_max = task.flex_arrays()

    def relative(value: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
        width = high - low
        safe = np.where(width > 0.0, width, 1.0)
        return np.where(width > 0.0, 2.0 * (value - low) / safe - 1.0, 1.0)

    return np.concatenate([relative(p_set, p_min, p_max), relative(q_set, q_min, q_max)])


class CurtailmentEnv(gym.Env):
    metadata = {"render_modes": []}

    def __init__(
        self,
        grid: Grid,
        reward_lambda: float = 2.0,
        steps_per_task: int = 5,
        pf_options: PowerFlowOptions | None = None,
        tasks: list[SupplyTask] | None = None,
    ) -> None:
        super().__init__()
        self.grid = grid
        self.reward_lambda = reward_lambda
        self.steps_per_task = steps_per_task
        self.pf_options = pf_options or PowerFlowOptions()
        self.tasks = tasks or []
        self.admittance = build_admittance(grid)
        self.observable = grid.observable_ids
        self.controllable = grid.controllable_ids
        if not self.controllable:
            raise EnvironmentStateError("grid has no controllable buses; the environment is undefined")

        k = len(self.controllable)
        self.observation_dim = 3 * len(self.observable) + 4 * k
        self.action_dim = 2 * k
        self.observation_space = spaces.Box(
            -np.inf, np.inf, shape=(self.observation_dim,), dtype=np.float64
        )
        self.action_space = spaces.Box(-1.0, 1.0, shape=(self.action_dim,), dtype=np.float64)

        self.task: SupplyTask | None = None
        self.solution: PowerFlowSolution | None = None
        self.p_set = np.zeros(k)
        self.q_set = np.zeros(k)
        self.steps_taken = 0

    @property
    def done(self) -> bool:
        return self.task is not None and self.steps_taken >= self.steps_per_task

    def _solve(self, injections: InjectionSet) -> PowerFlowSolution:
        return solve_power_flow(self.grid, injections, self.pf_options, admittance=self.admittance)

    def observe(self, solution: PowerFlowSolution, task: SupplyTask | None = None) -> np.ndarray:
        """Observation vector built from the observable buses and the task boxes only."""

        task = task or self.task
        if task is None:
            raise EnvironmentStateError("no task loaded; call reset first")
        ids = self.observable
        measured = np.column_stack([solution.p_calc[ids], solution.q_calc[ids], solution.v_mag[ids]])
        boxes = np.column_stack(task.flex_arrays())
        return np.concatenate([measured.reshape(-1), boxes.reshape(-1)])

    def reset_task(self, task: SupplyTask) -> np.ndarray:
        """Load a task at its uncurtailed setpoints and return the first observation.

        Raises:
            EnvironmentStateError: the task does not match the grid or its
                uncurtailed power flow diverges.
        """
        if len(task.p_ref) != self.grid.n_buses or task.controllable_ids() != self.controllable:
            raise EnvironmentStateError(f"task {task.task_id} does not belong to this grid")
        solution = self._solve(InjectionSet(p=task.p_ref_array(), q=task.q_ref_array()))
        if not solution.converged:
            raise EnvironmentStateError(
                f"task {task.task_id}: power flow diverged at reset "
                f"(mismatch {solution.max_mismatch:.2e}); filter non-physical tasks first"
            )
        self.task = task
        self.solution = solution
        self.p_set, self.q_set = task.uncurtailed_setpoints()
        self.steps_taken = 0
        return self.observe(solution)

    def apply_action(self, action: np.ndarray) -> InjectionSet:
        if self.task is None:
            raise EnvironmentStateError("no task loaded; call reset first")
        self.p_set, self.q_set = action_to_setpoints(self.task, action)
        return injections_for(self.task, self.p_set, self.q_set)

    def step(self, action: np.ndarray) -> tuple[np.ndarray, float, bool, bool, dict[str, Any]]:
        if self.task is None:
            raise EnvironmentStateError("no task loaded; call reset first")
        if self.done:
            raise EnvironmentStateError(
                f"task {self.task.task_id} already presented {self.steps_per_task} times"
            )
        pre_p, pre_q = self.p_set.copy(), self.q_set.copy()
        solution = self._solve(self.apply_action(action))
        terms = compute_reward(self.grid, self.task, solution, self.p_set, self.reward_lambda)
        if not solution.converged:
            logger.warning(f"Task {self.task.task_id}: power flow diverged after action")
        else:
            self.solution = solution
        self.steps_taken += 1

        info = {
            "violations": violation_report(self.grid, solution),
            "reward_terms": terms,
            "pre_p_set": pre_p,
            "pre_q_set": pre_q,
            "p_set": self.p_set.copy(),
            "q_set": self.q_set.copy(),
            "converged": solution.converged,
        }
        return self.observe(self.solution), terms.reward, self.done, False, info

    def reset(
        self, *, seed: int | None = None, options: dict[str, Any] | None = None
    ) -> tuple[np.ndarray, dict[str, Any]]:
        super().reset(seed=seed)
        task = (options or {}).get("task")
        if task is None:
            if not self.tasks:
                raise EnvironmentStateError("reset needs options={'task': ...} or a task list")
            task = self.tasks[int(self.np_random.integers(len(self.tasks)))]
        observation = self.reset_task(task)
        return observation, {"violations": violation_report(self.grid, self.solution)}
