"""Wall-clock comparison of agent inference and the OPF baseline."""

from __future__ import annotations

import json
import logging
import statistics
from pathlib import Path
from typing import Any

from grid_model import Grid
from opf_baseline import OpfOptions, solve_opf
from rl_agent import TIMING_FILE, CurtailmentEnv, DdpgAgent, EnvironmentStateError, run_episode
from scenario_gen import Dataset

from .evaluation import check_artefact_grid
from .models import TimingSummary

logger = logging.getLogger(__name__)

MIN_BENCH_TASKS = 20


def read_train_timing(checkpoint: str | Path) -> float | None:
    """Training wall-clock stored next to the final checkpoint, if any."""

    path = Path(checkpoint).parent / TIMING_FILE
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8")).get("train_wall_clock_s")


def bench(
    grid: Grid,
    dataset: Dataset,
    agent: DdpgAgent,
    metadata: dict[str, Any],
    *,
    opf_options: OpfOptions | None = None,
    repetitions: int = 5,
    train_total_s: float | None = None,
) -> TimingSummary:
    """Median over repetitions of the mean per-task time for agent and OPF.

    Agent time counts the actor evaluations of one greedy episode; OPF time is
    one ``solve_opf`` call. Both run on the same tasks, file I/O excluded.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    check_artefact_grid(grid, metadata.get("grid_hash"), "checkpoint")
    check_artefact_grid(grid, dataset.grid_hash, "dataset")
    if len(dataset) < MIN_BENCH_TASKS:
        logger.warning(f"Benchmarking on {len(dataset)} tasks; averages are noisy below {MIN_BENCH_TASKS}")

    env = CurtailmentEnv(
        grid, float(metadata.get("reward_lambda", 2.0)), int(metadata.get("steps_per_task", 5))
    )
    usable = []
    for task in dataset.tasks:
        try:
            env.reset_task(task)
        except EnvironmentStateError as exc:
            logger.warning(f"Skipping bench task {task.task_id}: {exc}")
            continue
        usable.append(task)
    if not usable:
        return TimingSummary(train_total_s=train_total_s, repetitions=repetitions)

    inference_means, opf_means = [], []
    for rep in range(repetitions):
        inference = [run_episode(env, agent, task).inference_time for task in usable]
        opf = [solve_opf(grid, task, opf_options).solve_time for task in usable]
        inference_means.append(statistics.fmean(inference))
        opf_means.append(statistics.fmean(opf))
        logger.debug(f"rep {rep}: inference {inference_means[-1]:.2e}s, OPF {opf_means[-1]:.2e}s")

    summary = TimingSummary(
        train_total_s=train_total_s,
        inference_per_task_s=statistics.median(inference_means),
        opf_per_task_s=statistics.median(opf_means),
        tasks=len(usable),
        repetitions=repetitions,
    )
    logger.info(
        f"Inference {summary.inference_per_task_s:.2e}s vs OPF {summary.opf_per_task_s:.2e}s per task"
    )
    return summary


def write_timing(summary: TimingSummary, path: str | Path) -> Path:
    """Merge the bench timings into ``path``, keeping keys written by training."""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
    payload.update(summary.model_dump(mode="json"))
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
