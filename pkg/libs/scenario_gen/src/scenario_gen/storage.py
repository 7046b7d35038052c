"""JSON-lines dataset files: one header record, then one SupplyTask per line."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from pydantic import ValidationError

from types_shared import Provenance, SupplyTask

from .errors import ScenarioConfigError
from .models import Dataset, DatasetDiagnostics, DatasetSplit

logger = logging.getLogger(__name__)

HEADER_KIND = "curtail-dataset"


def split(original: Dataset, augmented: Dataset) -> DatasetSplit:
    """Train on augmented variants only; keep the original tasks as test data."""

    if original.grid_hash != augmented.grid_hash:
        raise ScenarioConfigError("original and augmented datasets belong to different grids")
    train_tasks = [t for t in augmented.tasks if t.provenance is Provenance.AUGMENTED]
    test_tasks = [t for t in original.tasks if t.provenance is Provenance.ORIGINAL]
    return DatasetSplit(
        train=augmented.model_copy(update={"tasks": train_tasks}),
        test=original.model_copy(update={"tasks": test_tasks}),
    )


def write_dataset(dataset: Dataset, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "kind": HEADER_KIND,
        "grid_hash": dataset.grid_hash,
        "provenance": dataset.provenance.value,
        "seed": dataset.seed,
        "config": dataset.config,
        "diagnostics": dataset.diagnostics.model_dump(mode="json"),
    }
    with target.open("w", encoding="utf-8") as handle:
        handle.write(json.dumps(header, sort_keys=True) + "\n")
        for task in dataset.tasks:
            handle.write(task.model_dump_json() + "\n")
    logger.info(f"Wrote {len(dataset)} tasks to {target}")
    return target


def read_dataset(path: str | Path) -> Dataset:
    source = Path(path)
    lines = [line for line in source.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines:
        raise ScenarioConfigError(f"{source} is empty")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ScenarioConfigError(f"{source}: unreadable header: {exc}") from exc
    if not isinstance(header, dict) or header.get("kind") != HEADER_KIND:
        raise ScenarioConfigError(f"{source} is not a dataset file")

    try:
        tasks = [SupplyTask.model_validate_json(line) for line in lines[1:]]
        dataset = Dataset(
            grid_hash=header["grid_hash"],
            provenance=header["provenance"],
            seed=header["seed"],
            config=header.get("config", {}),
            tasks=tasks,
            diagnostics=DatasetDiagnostics.model_validate(header.get("diagnostics", {})),
        )
    except (KeyError, ValidationError) as exc:
        raise ScenarioConfigError(f"{source}: invalid dataset record: {exc}") from exc
    logger.info(f"Loaded {len(dataset)} tasks from {source}")
    return dataset
