"""Curtailment reward.

With ``L_V`` the largest voltage-band deviation, ``L_I`` the largest line
loading excess, ``C_P`` the mean curtailed active power over the ``k``
controllable buses and ``s = (lambda / k) * sum(p_max - p_min)``::

    reward = -min(L_V / s + L_I, 1)    if L_V + L_I > 0
    reward = 1 - C_P / s               otherwise

A diverged power flow scores -1. Since ``C_P <= s / lambda`` any
violation-free state scores above ``1 - 1/lambda > 0`` and every
violating state scores below zero.
"""

from __future__ import annotations

import numpy as np

from grid_model import Grid
from power_flow import PowerFlowSolution
from types_shared import SupplyTask

from .errors import EnvironmentStateError
from .models import RewardTerms


def normaliser(task: SupplyTask, reward_lambda: float) -> float:
    if not task.flex:
        raise EnvironmentStateError("reward undefined without controllable buses")
    return reward_lambda / len(task.flex) * sum(box.p_width for box in task.flex)


def compute_reward(
    grid: Grid,
    task: SupplyTask,
    solution: PowerFlowSolution,
    p_set: np.ndarray,
    reward_lambda: float = 2.0,
) -> RewardTerms:
    """Reward of the state reached after applying ``p_set`` at the controllable buses.

    Uses every bus and line of the grid, observable or not.
    """
    s = normaliser(task, reward_lambda)
    if not solution.converged:
        return RewardTerms(
            s=s, reward_lambda=reward_lambda, converged=False, violating=True, reward=-1.0
        )

    vectors = grid.vectors()
    v = solution.v_mag
    l_v = float(np.max(np.abs(v - np.clip(v, vectors.v_min, vectors.v_max)), initial=0.0))
    l_i = float(np.max(np.maximum(solution.loading - 1.0, 0.0), initial=0.0))
    p_ref, _ = task.uncurtailed_setpoints()
    c_p = float(np.mean(np.abs(p_ref - np.asarray(p_set, dtype=float))))

    violating = l_v + l_i > 0.0
    if violating:
        if s > 0.0:
            voltage_term = l_v / s
        else:
            voltage_term = np.inf if l_v > 0.0 else 0.0
        reward = -min(voltage_term + l_i, 1.0)
    else:
        reward = 1.0 - c_p / s if s > 0.0 else 1.0
    return RewardTerms(
        l_v=l_v,
        l_i=l_i,
        c_p=c_p,
        s=s,
        reward_lambda=reward_lambda,
        violating=violating,
        reward=float(np.clip(reward, -1.0, 1.0)),
    )
