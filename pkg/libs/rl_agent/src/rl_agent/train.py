"""DDPG training loop over a dataset of supply tasks.

Tasks are shuffled per pass and consumed in groups of ``task_group_size``;
each task is presented ``steps_per_task`` times in a row with its
setpoints carried over. After ``warmup`` experiences every environment
step triggers one update on a uniformly sampled batch. A single
``numpy`` Generator seeded from ``config.seed`` drives network init,
shuffling, exploration noise and replay sampling, so a fixed seed
reproduces the metrics log and checkpoints byte for byte.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from grid_model import Grid, grid_hash
from scenario_gen import Dataset
from types_shared import SupplyTask

from .ddpg import DdpgAgent, UpdateDiagnostics, ddpg_update, save_agent
from .env import CurtailmentEnv
from .errors import EnvironmentStateError
from .models import MetricRow, TrainConfig
from .replay import Experience, ReplayBuffer
from .rollout import resolution_rate

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"
AGENT_FILE = "agent.npz"
TIMING_FILE = "timing.json"


@dataclass
class TrainResult:
    agent: DdpgAgent
    metrics: list[MetricRow]
    steps: int
    wall_clock_s: float
    checkpoints: list[Path] = field(default_factory=list)
    agent_path: Path | None = None


def checkpoint_metadata(grid: Grid, config: TrainConfig, env: CurtailmentEnv, step: int) -> dict:
    return {
        "grid_hash": grid_hash(grid),
        "config": config.model_dump(mode="json", by_alias=True),
        "step": step,
        "observation_dim": env.observation_dim,
        "action_dim": env.action_dim,
        "steps_per_task": config.steps_per_task,
        "reward_lambda": config.reward_lambda,
    }


def write_metrics(rows: list[MetricRow], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(MetricRow.header())
        for row in rows:
            writer.writerow(row.values())
    return path


def _split_tasks(tasks: list[SupplyTask], n_validation: int) -> tuple[list[SupplyTask], list[SupplyTask]]:
    if n_validation == 0:
        return tasks, []
    validation = tasks[-n_validation:]
    training = tasks[:-n_validation] if len(tasks) > n_validation else tasks
    return training, validation


def train(
    grid: Grid,
    dataset: Dataset,
    config: TrainConfig | None = None,
    out_dir: str | Path | None = None,
) -> TrainResult:
    """Train a DDPG agent on ``dataset``; optionally write checkpoints and logs to ``out_dir``.

    Args:
        grid: Grid the dataset was generated for.
        dataset: Training tasks (augmented set); its tail serves as validation slice.
        config: Hyperparameters; ``total_steps=0`` returns the freshly initialised agent.
        out_dir: Receives ``metrics.csv``, ``agent.npz``, ``timing.json`` and
            periodic ``checkpoints/step_<n>.npz``.

    Returns:
        The trained agent, the metric rows and the written checkpoint paths.
    """
    config = config or TrainConfig()
    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    env = CurtailmentEnv(grid, config.reward_lambda, config.steps_per_task)
    eval_env = CurtailmentEnv(grid, config.reward_lambda, config.steps_per_task)
    agent = DdpgAgent.create(
        env.observation_dim,
        env.action_dim,
        config.hidden_width,
        rng,
        actor_lr=config.actor_lr,
        critic_lr=config.critic_lr,
        gamma=config.gamma,
        tau=config.tau,
    )
    training, validation = _split_tasks(list(dataset.tasks), config.validation_tasks)
    if config.total_steps > 0 and not training:
        raise EnvironmentStateError("no training tasks")

    out = Path(out_dir) if out_dir is not None else None
    buffer = ReplayBuffer(env.observation_dim, env.action_dim, config.buffer_capacity)
    metrics: list[MetricRow] = []
    checkpoints: list[Path] = []
    window: list[float] = []
    last: UpdateDiagnostics | None = None
    step = 0
    min_fill = max(config.warmup, config.batch_size)
    logger.info(
        f"Training on {len(training)} tasks ({len(validation)} validation) "
        f"for {config.total_steps} steps, seed {config.seed}"
    )

    while step < config.total_steps:
        order = rng.permutation(len(training))
        steps_at_pass_start = step
        for start in range(0, len(order), config.task_group_size):
            for index in order[start : start + config.task_group_size]:
                task = training[int(index)]
                try:
                    observation = env.reset_task(task)
                except EnvironmentStateError as exc:
                    logger.warning(f"Skipping training task {task.task_id}: {exc}")
                    continue

                while not env.done and step < config.total_steps:
                    action = agent.act(observation, config.noise_sigma(step), rng)
                    next_observation, reward, done, _, _ = env.step(action)
                    buffer.push(Experience(observation, action, reward, next_observation, done))
                    observation = next_observation
                    window.append(reward)
                    step += 1

                    if len(buffer) >= min_fill:
                        last = ddpg_update(agent, buffer.sample(config.batch_size, rng))

                    if step % config.log_every == 0:
                        row = MetricRow(
                            step=step,
                            mean_reward=float(np.mean(window)),
                            resolution_rate=resolution_rate(eval_env, agent, validation),
                            critic_loss=last.critic_loss if last else float("nan"),
                            actor_loss=last.actor_loss if last else float("nan"),
                        )
                        metrics.append(row)
                        window = []
                        logger.info(
                            f"step {row.step}: mean reward {row.mean_reward:.4f}, "
                            f"resolution {row.resolution_rate:.3f}, critic loss {row.critic_loss:.4g}"
                        )

                    if out is not None and step % config.checkpoint_every == 0:
                        path = out / "checkpoints" / f"step_{step}.npz"
                        checkpoints.append(
                            save_agent(path, agent, checkpoint_metadata(grid, config, env, step))
                        )

                if step >= config.total_steps:
                    break
            if step >= config.total_steps:
                break
        if step == steps_at_pass_start:
            raise EnvironmentStateError("every training task failed to reset")

    elapsed = time.perf_counter() - started
    result = TrainResult(agent, metrics, step, elapsed, checkpoints)
    if out is not None:
        result.agent_path = save_agent(
            out / AGENT_FILE, agent, checkpoint_metadata(grid, config, env, step)
        )
        write_metrics(metrics, out / METRICS_FILE)
        (out / TIMING_FILE).write_text(
            json.dumps({"train_wall_clock_s": elapsed, "steps": step}, indent=2) + "\n",
            encoding="utf-8",
        )
    logger.info(f"Training finished after {step} steps in {elapsed:.1f}s")
    return result
