"""Reduced-space penalty OPF over the controllable setpoints.

The network equations are eliminated by running the power flow inside the
objective; band and loading limits enter as quadratic penalties whose
weight grows per outer iteration. The inner solver is projected gradient
descent on the flexibility box with central finite differences and a
step-halving line search.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from grid_model import AdmittanceMatrix, Grid, build_admittance
from power_flow import PowerFlowSolution, solve_power_flow
from types_shared import SupplyTask, ViolationReport

from .feasibility import curtailment_cost, excesses, injections_for, violation_report
from .models import OpfOptions, OpfSolution

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-10


@dataclass(frozen=True)
class _Evaluation:
    converged: bool
    cost: float
    violation: float
    worst_excess: float


class SetpointProblem:
    """Memoized power-flow evaluations of (p, q) points for one task."""

    def __init__(
        self,
        grid: Grid,
        task: SupplyTask,
        opts: OpfOptions,
        admittance: AdmittanceMatrix,
    ) -> None:
        self.grid = grid
        self.task = task
        self.opts = opts
        self.admittance = admittance
        self.k = len(task.flex)
        p_min, p_max, q_min, q_max = task.flex_arrays()
        self.lower = np.concatenate([p_min, q_min])
        self.upper = np.concatenate([p_max, q_max])
        self.free = self.upper - self.lower > 0.0
        self._cache: dict[tuple[float, ...], _Evaluation] = {}
        self._solutions: dict[tuple[float, ...], PowerFlowSolution] = {}
        self._warm: tuple[np.ndarray, np.ndarray] | None = None
        self.best_feasible: tuple[float, np.ndarray] | None = None
        self.least_violating: tuple[float, np.ndarray] | None = None

    @property
    def evaluations(self) -> int:
        return len(self._cache)

    def start_point(self) -> np.ndarray:
        p_ref, q_ref = self.task.uncurtailed_setpoints()
        return self.clip(np.concatenate([p_ref, q_ref]))

    @staticmethod
    def _key(x: np.ndarray) -> tuple[float, ...]:
        return tuple(float(v) for v in x)

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def solve(self, x: np.ndarray) -> PowerFlowSolution:
        options = self.opts.power_flow
        if self._warm is not None:
            options = options.model_copy(update={"flat_start": False})
        return solve_power_flow(
            self.grid,
            injections_for(self.task, x[: self.k], x[self.k :]),
            options,
            admittance=self.admittance,
            initial=self._warm,
        )

    def evaluate(self, x: np.ndarray) -> _Evaluation:
        key = self._key(x)
        cached = self._cache.get(key)
        if cached is not None:
            return cached

        solution = self.solve(x)
        if solution.converged:
            if self._warm is None:
                self._warm = (solution.v_mag.copy(), solution.v_ang.copy())
            upper, lower, loading = excesses(self.grid, solution)
            violation = float(np.sum(upper**2) + np.sum(lower**2) + np.sum(loading**2))
            worst = float(
                max(upper.max(initial=0.0), lower.max(initial=0.0), loading.max(initial=0.0))
            )
            cost = curtailment_cost(self.grid, self.task, x[: self.k])
            evaluation = _Evaluation(True, cost, violation, worst)
            self._solutions[key] = solution
            self._record(x, evaluation)
        else:
            evaluation = _Evaluation(False, np.inf, np.inf, np.inf)
        self._cache[key] = evaluation
        return evaluation

    def _record(self, x: np.ndarray, evaluation: _Evaluation) -> None:
        if np.any(x < self.lower) or np.any(x > self.upper):
            return
        if evaluation.worst_excess <= self.opts.feasibility_tol:
            if self.best_feasible is None or evaluation.cost < self.best_feasible[0]:
                self.best_feasible = (evaluation.cost, x.copy())
        if self.least_violating is None or evaluation.worst_excess < self.least_violating[0]:
            self.least_violating = (evaluation.worst_excess, x.copy())

    def penalized(self, x: np.ndarray, weight: float) -> float:
        evaluation = self.evaluate(x)
        if not evaluation.converged:
            return np.inf
        return evaluation.cost + weight * evaluation.violation

    def gradient(self, x: np.ndarray, weight: float) -> np.ndarray:
        grad = np.zeros_like(x)
        h = self.opts.fd_step
        for i in np.flatnonzero(self.free):
            forward = x.copy()
            backward = x.copy()
            forward[i] = min(x[i] + h, self.upper[i])
            backward[i] = max(x[i] - h, self.lower[i])
            f_plus = self.penalized(forward, weight)
            f_minus = self.penalized(backward, weight)
            if np.isfinite(f_plus) and np.isfinite(f_minus):
                grad[i] = (f_plus - f_minus) / (forward[i] - backward[i])
            elif np.isfinite(f_plus) and forward[i] > x[i]:
                grad[i] = (f_plus - self.penalized(x, weight)) / (forward[i] - x[i])
            elif np.isfinite(f_minus) and backward[i] < x[i]:
                grad[i] = (self.penalized(x, weight) - f_minus) / (x[i] - backward[i])
        return grad

    def result(self, elapsed: float) -> OpfSolution:
        """Best feasible point, else the least-violating one, as an OpfSolution."""

        k = self.k
        diagnostic = ""
        if self.best_feasible is not None:
            chosen = self.best_feasible[1]
            feasible = True
        elif self.least_violating is not None:
            chosen = self.least_violating[1]
            feasible = False
            diagnostic = "no feasible setpoints found"
            logger.warning(f"Task {self.task.task_id}: OPF found no feasible setpoints")
        else:
            chosen = self.start_point()
            feasible = False
            diagnostic = "power flow diverged at every trial point"
            logger.warning(f"Task {self.task.task_id}: power flow diverged at every OPF trial point")

        solution = self._solutions.get(self._key(chosen))
        if solution is None:
            report = ViolationReport.non_physical_state(self.opts.feasibility_tol)
        else:
            report = violation_report(self.grid, solution, self.opts.feasibility_tol)

        return OpfSolution(
            buses=self.task.controllable_ids(),
            p_set=[float(v) for v in chosen[:k]],
            q_set=[float(v) for v in chosen[k:]],
            objective=curtailment_cost(self.grid, self.task, chosen[:k]),
            feasible=feasible,
            violation_report=report,
            solve_time=elapsed,
            evaluations=self.evaluations,
            diagnostic=diagnostic,
            task_id=self.task.task_id,
        )


def _minimize(problem: SetpointProblem, x: np.ndarray, weight: float) -> np.ndarray:
    """Projected gradient descent with step halving for one penalty weight."""

    if not np.any(problem.free):
        return x
    width = np.where(problem.free, problem.upper - problem.lower, 0.0)
    step = 1.0
    value = problem.penalized(x, weight)
    for _ in range(problem.opts.max_inner_iterations):
        if not np.isfinite(value):
            break
        grad = problem.gradient(x, weight)
        scale = float(np.max(np.abs(grad) * width))
        if scale == 0.0:
            break
        direction = -grad * width / scale

        step = min(1.0, step * 2.0)
        accepted = False
        while step >= MIN_STEP:
            candidate = problem.clip(x + step * direction)
            moved = candidate - x
            if not np.any(moved):
                break
            trial = problem.penalized(candidate, weight)
            if trial <= value + ARMIJO * float(grad @ moved):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        x, value = candidate, trial
    return x


def solve_opf(grid: Grid, task: SupplyTask, opts: OpfOptions | None = None) -> OpfSolution:
    """Minimise the curtailment cost subject to the band and loading limits.

    Args:
        grid: Valid grid the task belongs to.
        task: Supply task; its flex boxes bound the decision variables.
        opts: Penalty schedule and tolerances.

    Returns:
        The cheapest feasible point seen during the search, or, when none was
        found, the least-violating one with ``feasible=False``.
    """
    opts = opts or OpfOptions()
    if len(task.p_ref) != grid.n_buses:
        raise ValueError(f"task {task.task_id} has {len(task.p_ref)} buses, grid has {grid.n_buses}")
    started = time.perf_counter()
    problem = SetpointProblem(grid, task, opts, build_admittance(grid))

    x = problem.start_point()
    for outer, weight in enumerate(opts.schedule()):
        x = _minimize(problem, x, weight)
        evaluation = problem.evaluate(x)
        logger.debug(
            f"Task {task.task_id}: outer {outer} weight {weight:.0e} "
            f"cost {evaluation.cost:.6f} worst excess {evaluation.worst_excess:.2e}"
        )
        if evaluation.converged and evaluation.worst_excess <= opts.feasibility_tol:
            break

    return problem.result(time.perf_counter() - started)
