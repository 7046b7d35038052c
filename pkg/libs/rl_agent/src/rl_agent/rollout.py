from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from opf_baseline import violation_report
from types_shared import SupplyTask, ViolationReport

from .ddpg import DdpgAgent
from .env import CurtailmentEnv
from .errors import EnvironmentStateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpisodeResult:
    task_id: int
    rewards: list[float]
    p_set: np.ndarray
    q_set: np.ndarray
    initial_report: ViolationReport
    final_report: ViolationReport
    inference_time: float = field(default=0.0)

    @property
    def final_reward(self) -> float:
        return self.rewards[-1]

    @property
    def resolved(self) -> bool:
        return self.initial_report.has_violation and not self.final_report.has_violation


def run_episode(
    env: CurtailmentEnv,
    agent: DdpgAgent,
    task: SupplyTask,
    *,
    noise_sigma: float = 0.0,
    rng: np.random.Generator | None = None,
) -> EpisodeResult:
    """Present ``task`` for ``env.steps_per_task`` steps with the agent's policy.

    ``inference_time`` sums the actor evaluations only, not the power flows.
    """
    observation = env.reset_task(task)
    initial = violation_report(env.grid, env.solution)
    rewards: list[float] = []
    inference = 0.0
    info: dict = {}
    while not env.done:
        started = time.perf_counter()
        action = agent.act(observation, noise_sigma, rng)
        inference += time.perf_counter() - started
        observation, reward, _, _, info = env.step(action)
        rewards.append(reward)
    return EpisodeResult(
        task_id=task.task_id,
        rewards=rewards,
        p_set=info["p_set"],
        q_set=info["q_set"],
        initial_report=initial,
        final_report=info["violations"],
        inference_time=inference,
    )


def resolution_rate(env: CurtailmentEnv, agent: DdpgAgent, tasks: list[SupplyTask]) -> float:
    """Share of initially violating tasks left violation-free by greedy episodes.

    Returns 1.0 when none of the tasks violates to begin with.
    """
    violating = 0
    resolved = 0
    for task in tasks:
        try:
            result = run_episode(env, agent, task)
        except EnvironmentStateError as exc:
            logger.warning(f"Skipping validation task {task.task_id}: {exc}")
            continue
        if result.initial_report.has_violation:
            violating += 1
            resolved += int(result.resolved)
    return resolved / violating if violating else 1.0
