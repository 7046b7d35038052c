"""Agent and OPF evaluation on held-out supply tasks.

Every resolution flag is certified by a fresh ``check_feasibility`` run on
the final setpoints, independent of the environment's own power flow.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from grid_model import Grid, grid_hash
from opf_baseline import OpfOptions, check_feasibility, solve_opf, violation_report
from power_flow import InjectionSet, solve_power_flow
from rl_agent import CurtailmentEnv, DdpgAgent, EnvironmentStateError, run_episode
from scenario_gen import Dataset
from types_shared import SupplyTask, ViolationReport

from .errors import GridHashMismatchError
from .models import CATEGORIES, CategorySummary, EvalRecord, Series, SummaryTable, TimingSummary

logger = logging.getLogger(__name__)

ACTED_THRESHOLD = 0.01
RECORDS_FILE = "records.jsonl"
SUMMARY_FILE = "summary.json"


def check_artefact_grid(grid: Grid, expected_hash: str | None, artefact: str) -> None:
    actual = grid_hash(grid)
    if expected_hash != actual:
        raise GridHashMismatchError(artefact, str(expected_hash), actual)


def _ratio(value: float, total: float) -> float | None:
    if total <= 0.0:
        return None
    return float(np.clip(value / total, 0.0, 1.0))


def relative_curtailment(
    task: SupplyTask, p_set: np.ndarray, q_set: np.ndarray
) -> tuple[float | None, float | None]:
    """Summed absolute deviation from the reference over the summed box widths.

    Returns ``None`` for an axis without any flexibility.
    """
    p_min, p_max, q_min, q_max = task.flex_arrays()
    p_ref, q_ref = task.uncurtailed_setpoints()
    p_dev = float(np.sum(np.abs(p_ref - np.asarray(p_set, dtype=float))))
    q_dev = float(np.sum(np.abs(q_ref - np.asarray(q_set, dtype=float))))
    return (
        _ratio(p_dev, float(np.sum(np.abs(p_max - p_min)))),
        _ratio(q_dev, float(np.sum(np.abs(q_max - q_min)))),
    )


def _reference_report(grid: Grid, task: SupplyTask, tol: float) -> ViolationReport:
    if task.labels is not None:
        return task.labels
    solution = solve_power_flow(grid, InjectionSet(p=task.p_ref_array(), q=task.q_ref_array()))
    return violation_report(grid, solution, tol)


def build_record(
    grid: Grid,
    task: SupplyTask,
    p_set: np.ndarray,
    q_set: np.ndarray,
    source: Series,
    *,
    inference_time: float = 0.0,
    final_reward: float | None = None,
    tol: float = 1e-4,
) -> EvalRecord:
    pre = _reference_report(grid, task, tol)
    post = check_feasibility(grid, task, np.asarray(p_set), np.asarray(q_set), tol)
    physical = not post.non_physical
    p_ratio, q_ratio = relative_curtailment(task, p_set, q_set)
    return EvalRecord(
        task_id=task.task_id,
        source=source,
        pre_violation=pre.has_violation,
        pre_upper_voltage=pre.upper_voltage,
        pre_lower_voltage=pre.lower_voltage,
        pre_overload=pre.overload,
        resolved=pre.has_violation and not post.has_violation,
        resolved_upper_voltage=pre.upper_voltage and physical and not post.upper_voltage,
        resolved_lower_voltage=pre.lower_voltage and physical and not post.lower_voltage,
        resolved_overload=pre.overload and physical and not post.overload,
        post_violation=post.has_violation,
        max_loading=post.max_loading,
        v_min=post.v_min,
        v_max=post.v_max,
        relative_p_curtailment=p_ratio,
        relative_q_curtailment=q_ratio,
        flexibility=sum(box.p_width for box in task.flex),
        acted=p_ratio is not None and p_ratio > ACTED_THRESHOLD,
        inference_time=inference_time,
        final_reward=final_reward,
        p_set=[float(v) for v in p_set],
        q_set=[float(v) for v in q_set],
    )


def evaluate_agent_task(
    grid: Grid,
    agent: DdpgAgent,
    task: SupplyTask,
    *,
    steps_per_task: int = 5,
    reward_lambda: float = 2.0,
    tol: float = 1e-4,
) -> EvalRecord | None:
    """Greedy episode on ``task``; the final step's setpoints are judged."""

    env = CurtailmentEnv(grid, reward_lambda, steps_per_task)
    try:
        result = run_episode(env, agent, task)
    except EnvironmentStateError as exc:
        logger.warning(f"Skipping test task {task.task_id}: {exc}")
        return None
    return build_record(
        grid,
        task,
        result.p_set,
        result.q_set,
        Series.RL,
        inference_time=result.inference_time,
        final_reward=result.final_reward,
        tol=tol,
    )


def evaluate_opf_task(
    grid: Grid, task: SupplyTask, opts: OpfOptions | None = None, tol: float = 1e-4
) -> EvalRecord:
    solution = solve_opf(grid, task, opts)
    if not solution.feasible:
        logger.warning(f"Task {task.task_id}: OPF found no feasible point ({solution.diagnostic})")
    return build_record(
        grid,
        task,
        np.asarray(solution.p_set),
        np.asarray(solution.q_set),
        Series.OPF,
        inference_time=solution.solve_time,
        tol=tol,
    )


def _category_rows(records: list[EvalRecord]) -> list[CategorySummary]:
    rows = []
    for name in CATEGORIES:
        flags = [record.category_flags()[name] for record in records]
        count = sum(1 for violated, _ in flags if violated)
        solved = sum(1 for violated, resolved in flags if violated and resolved)
        rows.append(
            CategorySummary(
                category=name,
                count=count,
                solved=solved,
                solved_pct=100.0 * solved / count if count else None,
            )
        )
    return rows


def summarize(records: list[EvalRecord], train_total_s: float | None = None) -> SummaryTable:
    """Aggregate records; counts are recomputed from the record flags every time."""

    rl = [r for r in records if r.source is Series.RL]
    opf = [r for r in records if r.source is Series.OPF]
    violating = [r for r in rl if r.pre_violation]
    curtailments = [r.relative_p_curtailment for r in violating if r.relative_p_curtailment is not None]

    unnecessary_rl = sum(1 for r in rl if r.acted and not r.pre_violation)
    unnecessary_opf = sum(1 for r in opf if r.acted and not r.pre_violation) if opf else None
    return SummaryTable(
        rl=_category_rows(rl),
        opf=_category_rows(opf) if opf else None,
        detection_rate=sum(1 for r in violating if r.acted) / len(violating) if violating else None,
        mean_relative_p_curtailment=float(np.mean(curtailments)) if curtailments else None,
        unnecessary_rl=unnecessary_rl,
        unnecessary_opf=unnecessary_opf,
        unnecessary_curtailment_ratio=(
            unnecessary_rl / max(unnecessary_opf, 1) if unnecessary_opf is not None else None
        ),
        timing=TimingSummary(train_total_s=train_total_s),
    )


def evaluate(
    grid: Grid,
    agent: DdpgAgent,
    metadata: dict[str, Any],
    dataset: Dataset,
    *,
    with_opf: bool = False,
    opf_options: OpfOptions | None = None,
    tol: float = 1e-4,
    workers: int = 1,
    train_total_s: float | None = None,
) -> tuple[list[EvalRecord], SummaryTable]:
    """Run the agent (and optionally the OPF) on every test task.

    Records come back ordered by task id, then source, whatever ``workers`` is.

    Raises:
        GridHashMismatchError: checkpoint or dataset built for another grid.
    """
    check_artefact_grid(grid, metadata.get("grid_hash"), "checkpoint")
    check_artefact_grid(grid, dataset.grid_hash, "dataset")
    steps_per_task = int(metadata.get("steps_per_task", 5))
    reward_lambda = float(metadata.get("reward_lambda", 2.0))
    tasks = sorted(dataset.tasks, key=lambda t: t.task_id)
    logger.info(f"Evaluating {len(tasks)} tasks with {workers} worker(s), OPF: {with_opf}")

    def run_agent(task: SupplyTask) -> EvalRecord | None:
        return evaluate_agent_task(
            grid, agent, task, steps_per_task=steps_per_task, reward_lambda=reward_lambda, tol=tol
        )

    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        records = [r for r in pool.map(run_agent, tasks) if r is not None]
        if with_opf:
            usable = {r.task_id for r in records}
            opf_tasks = [t for t in tasks if t.task_id in usable]
            records.extend(pool.map(lambda t: evaluate_opf_task(grid, t, opf_options, tol), opf_tasks))

    order = {Series.RL: 0, Series.OPF: 1}
    records.sort(key=lambda r: (r.task_id, order[r.source]))
    summary = summarize(records, train_total_s)
    total = summary.category("total")
    logger.info(f"Resolved {total.solved}/{total.count} violating tasks")
    return records, summary


def write_records(records: list[EvalRecord], path: str | Path) -> Path:
    """JSON lines without the wall-clock field, so reruns give equal bytes."""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(record.model_dump_json(exclude={"inference_time"}) + "\n")
    return path


def read_records(path: str | Path) -> list[EvalRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [EvalRecord.model_validate_json(line) for line in lines if line.strip()]


def write_summary(summary: SummaryTable, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(summary.model_dump(mode="json"), indent=2, sort_keys=True)
    path.write_text(payload + "\n", encoding="utf-8")
    return path
