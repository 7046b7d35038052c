"""``curtail`` command line: dataset pipeline, training, evaluation and timing."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from grid_model import (
    GridParseError,
    GridValidationError,
    load_grid,
    save_grid,
    synthetic_feeder,
)
from neural_core import CheckpointFormatError, ShapeMismatchError
from opf_baseline import BruteForceLimitError, label_opf
from rl_agent import (
    TIMING_FILE,
    EnvironmentStateError,
    NonFiniteLossError,
    ReplayBufferError,
    load_agent,
    train,
)
from scenario_gen import (
    ScenarioConfigError,
    augment,
    generate_profiles,
    label_violations,
    read_dataset,
    select_violating,
    split,
    write_dataset,
)

from .bench import bench, read_train_timing, write_timing
from .errors import GridHashMismatchError
from .evaluation import (
    RECORDS_FILE,
    SUMMARY_FILE,
    check_artefact_grid,
    evaluate,
    read_records,
    write_records,
    write_summary,
)
from .models import ScatterMode
from .scatter import write_scatter
from .settings import load_run_config, log_level, resolve_out

logger = logging.getLogger(__name__)

DOMAIN_ERRORS: tuple[type[Exception], ...] = (
    GridParseError,
    GridValidationError,
    GridHashMismatchError,
    ScenarioConfigError,
    ShapeMismatchError,
    CheckpointFormatError,
    BruteForceLimitError,
    EnvironmentStateError,
    ReplayBufferError,
    NonFiniteLossError,
    ValueError,
    OSError,
)


def _require_grid(args: argparse.Namespace):
    if args.grid is None:
        raise ValueError(f"{args.command} needs --grid")
    return load_grid(args.grid)


def _seed(args: argparse.Namespace, default: int) -> int:
    return args.seed if args.seed is not None else default


def cmd_generate(args: argparse.Namespace) -> dict[str, Any]:
    config = load_run_config(args.config)
    out = resolve_out(args.out)
    seed = _seed(args, 0)
    outputs: dict[str, Any] = {}
    if args.feeder_buses is not None:
        grid = synthetic_feeder(args.feeder_buses, seed=seed)
        outputs["grid"] = str(save_grid(grid, out / "grid.json"))
    else:
        grid = _require_grid(args)

    dataset = label_violations(grid, generate_profiles(grid, config.profiles, seed=seed))
    if config.profiles.violating_only:
        dataset = select_violating(dataset)
    outputs["dataset"] = str(write_dataset(dataset, out / "dataset.jsonl"))
    outputs["tasks"] = len(dataset)
    outputs["violating"] = dataset.diagnostics.violating
    return outputs


def cmd_label(args: argparse.Namespace) -> dict[str, Any]:
    grid = _require_grid(args)
    dataset = label_violations(grid, read_dataset(args.dataset))
    path = write_dataset(dataset, resolve_out(args.out) / "labelled.jsonl")
    return {"dataset": str(path), "tasks": len(dataset), "violating": dataset.diagnostics.violating}


def cmd_augment(args: argparse.Namespace) -> dict[str, Any]:
    grid = _require_grid(args)
    config = load_run_config(args.config)
    original = read_dataset(args.dataset)
    if not original.labelled:
        original = label_violations(grid, original)
    augmented = augment(grid, original, config.augment, seed=_seed(args, 0))
    parts = split(original, augmented)
    out = resolve_out(args.out)
    return {
        "train": str(write_dataset(parts.train, out / "train.jsonl")),
        "test": str(write_dataset(parts.test, out / "test.jsonl")),
        "train_tasks": len(parts.train),
        "test_tasks": len(parts.test),
        "replicated": augmented.diagnostics.replicated,
    }


def cmd_opf(args: argparse.Namespace) -> dict[str, Any]:
    grid = _require_grid(args)
    config = load_run_config(args.config)
    dataset = read_dataset(args.dataset)
    check_artefact_grid(grid, dataset.grid_hash, "dataset")
    solutions = label_opf(grid, dataset.tasks, config.opf)
    path = resolve_out(args.out) / "opf.jsonl"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for solution in solutions:
            handle.write(solution.model_dump_json(exclude={"solve_time"}) + "\n")
    return {"solutions": str(path), "feasible": sum(1 for s in solutions if s.feasible)}


def cmd_train(args: argparse.Namespace) -> dict[str, Any]:
    grid = _require_grid(args)
    config = load_run_config(args.config).train
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    dataset = read_dataset(args.dataset)
    check_artefact_grid(grid, dataset.grid_hash, "dataset")
    result = train(grid, dataset, config, resolve_out(args.out))
    return {
        "agent": str(result.agent_path),
        "steps": result.steps,
        "checkpoints": [str(p) for p in result.checkpoints],
        "wall_clock_s": result.wall_clock_s,
    }


def cmd_eval(args: argparse.Namespace) -> dict[str, Any]:
    grid = _require_grid(args)
    config = load_run_config(args.config)
    agent, metadata = load_agent(args.checkpoint)
    records, summary = evaluate(
        grid,
        agent,
        metadata,
        read_dataset(args.dataset),
        with_opf=args.with_opf,
        opf_options=config.opf,
        workers=args.workers,
        train_total_s=read_train_timing(args.checkpoint),
    )
    out = resolve_out(args.out)
    return {
        "records": str(write_records(records, out / RECORDS_FILE)),
        "summary": str(write_summary(summary, out / SUMMARY_FILE)),
        "resolved_pct": summary.category("total").solved_pct,
    }


def cmd_scatter(args: argparse.Namespace) -> dict[str, Any]:
    grid = _require_grid(args)
    mode = ScatterMode(args.mode)
    path = write_scatter(
        read_records(args.records),
        mode,
        grid,
        resolve_out(args.out) / f"scatter_{mode.value}.csv",
        violating_only=args.violating_only,
    )
    return {"scatter": str(path)}


def cmd_bench(args: argparse.Namespace) -> dict[str, Any]:
    grid = _require_grid(args)
    config = load_run_config(args.config)
    agent, metadata = load_agent(args.checkpoint)
    summary = bench(
        grid,
        read_dataset(args.dataset),
        agent,
        metadata,
        opf_options=config.opf,
        repetitions=args.repetitions,
        train_total_s=read_train_timing(args.checkpoint),
    )
    path = write_timing(summary, resolve_out(args.out) / TIMING_FILE)
    return {"timing": str(path), **summary.model_dump(mode="json")}


COMMANDS: dict[str, Callable[[argparse.Namespace], dict[str, Any]]] = {
    "generate": cmd_generate,
    "label": cmd_label,
    "augment": cmd_augment,
    "opf": cmd_opf,
    "train": cmd_train,
    "eval": cmd_eval,
    "scatter": cmd_scatter,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=Path, help="Grid JSON file")
    common.add_argument("--seed", type=int, default=None, help="Overrides the configured seed")
    common.add_argument("--config", type=Path, help="Run config JSON with profiles/augment/opf/train sections")
    common.add_argument("--out", type=Path, help="Output directory; relative paths resolve under CURTAIL_HOME")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(prog="curtail", description="Curative curtailment pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", parents=[common], help="Generate and label supply tasks")
    generate.add_argument("--feeder-buses", type=int, help="Build a synthetic feeder instead of --grid")

    for name, text in (
        ("label", "Re-label a dataset file"),
        ("augment", "Augment a labelled dataset and write the train/test split"),
        ("opf", "Solve the OPF for every task of a dataset"),
        ("train", "Train a DDPG agent on a dataset"),
    ):
        sub.add_parser(name, parents=[common], help=text).add_argument(
            "--dataset", type=Path, required=True
        )

    evaluate_cmd = sub.add_parser("eval", parents=[common], help="Evaluate a checkpoint on test tasks")
    evaluate_cmd.add_argument("--checkpoint", type=Path, required=True)
    evaluate_cmd.add_argument("--dataset", type=Path, required=True)
    evaluate_cmd.add_argument("--with-opf", action="store_true", help="Also solve the OPF per task")
    evaluate_cmd.add_argument("--workers", type=int, default=1)

    scatter = sub.add_parser("scatter", parents=[common], help="Write scatter CSV from eval records")
    scatter.add_argument("--records", type=Path, required=True)
    scatter.add_argument("--mode", choices=[m.value for m in ScatterMode], default=ScatterMode.LOADING_VS_P.value)
    scatter.add_argument(
        "--violating-only", action="store_true", help="Only tasks that violated before curtailment"
    )

    bench_cmd = sub.add_parser("bench", parents=[common], help="Time agent inference against the OPF")
    bench_cmd.add_argument("--checkpoint", type=Path, required=True)
    bench_cmd.add_argument("--dataset", type=Path, required=True)
    bench_cmd.add_argument("--repetitions", type=int, default=5)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=log_level(args.verbose))
    try:
        outputs = COMMANDS[args.command](args)
    except DOMAIN_ERRORS as exc:
        logger.error(f"{args.command} failed: {exc}")
        error = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(error), file=sys.stderr)
        return 1
    print(json.dumps(outputs, indent=2, sort_keys=True))
    return 0
