"""Bound-noise augmentation of labelled supply tasks.

Each variant perturbs ``p_min``/``p_max`` of every controllable bus with
truncated Gaussian noise and moves the bus to its (new) maximum output, so
the uncurtailed state sits at the edge of the box. Variants whose power
flow diverges are dropped by the relabelling pass. Lower-band cases are
then copied until they reach the configured share of violating variants.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.stats import truncnorm

from grid_model import Grid
from types_shared import FlexBox, Provenance, SupplyTask

from .errors import ScenarioConfigError
from .labeling import check_grid, label_violations
from .models import AugmentConfig, Dataset

logger = logging.getLogger(__name__)


def _keep_sign(original: float, value: float) -> float:
    return max(value, 0.0) if original >= 0.0 else min(value, 0.0)


def perturb_box(box: FlexBox, config: AugmentConfig, rng: np.random.Generator) -> FlexBox:
    """Noisy copy of a box; signs of both bounds and ``p_min <= p_max`` are preserved."""

    scale = config.bound_noise_sigma * max(abs(box.p_min), abs(box.p_max))
    if scale == 0.0:
        return box.model_copy()
    noise = truncnorm.rvs(
        -config.truncation, config.truncation, scale=scale, size=2, random_state=rng
    )
    low = _keep_sign(box.p_min, box.p_min + float(noise[0]))
    high = _keep_sign(box.p_max, box.p_max + float(noise[1]))
    if low > high:
        low, high = high, low
    return box.model_copy(update={"p_min": low, "p_max": high})


def augment_task(
    task: SupplyTask,
    config: AugmentConfig,
    rng: np.random.Generator,
    task_id: int,
) -> SupplyTask:
    p_ref = list(task.p_ref)
    flex = []
    for box in task.flex:
        noisy = perturb_box(box, config, rng)
        p_ref[box.bus] = noisy.p_max
        flex.append(noisy)
    return task.model_copy(
        update={
            "task_id": task_id,
            "p_ref": p_ref,
            "flex": flex,
            "labels": None,
            "provenance": Provenance.AUGMENTED,
            "source_task": task.task_id,
        }
    )


def _lower_band_copies(tasks: list[SupplyTask], target: float, next_id: int) -> list[SupplyTask]:
    violating = [t for t in tasks if t.labels is not None and t.labels.has_violation]
    lower = [t for t in violating if t.labels.lower_voltage]
    if not violating or target == 0.0:
        return []
    if not lower:
        logger.warning("No lower-band variants to replicate; lower-band share stays at 0")
        return []

    n = 0
    while len(lower) + n < target * (len(violating) + n):
        n += 1
    return [
        lower[i % len(lower)].model_copy(update={"task_id": next_id + i}) for i in range(n)
    ]


def augment(grid: Grid, dataset: Dataset, config: AugmentConfig, seed: int = 0) -> Dataset:
    """Emit ``config.multiplier`` noisy variants per task of a labelled dataset.

    Returns a relabelled dataset with ``provenance="augmented"``. Ids continue
    after the largest original id; ``source_task`` links every variant back.

    Raises:
        ScenarioConfigError: multiplier below 1, unlabelled input or a dataset
            built for another grid.
    """
    if config.multiplier < 1:
        raise ScenarioConfigError(f"multiplier must be >= 1, got {config.multiplier}")
    if not dataset.labelled:
        raise ScenarioConfigError("dataset must be labelled before augmentation")
    check_grid(grid, dataset)

    next_id = max((task.task_id for task in dataset.tasks), default=-1) + 1
    variants: list[SupplyTask] = []
    for round_index in range(config.multiplier):
        for task in dataset.tasks:
            rng = np.random.default_rng([seed, round_index, task.task_id])
            variants.append(augment_task(task, config, rng, next_id))
            next_id += 1

    augmented = Dataset(
        grid_hash=dataset.grid_hash,
        provenance=Provenance.AUGMENTED,
        seed=seed,
        config=config.model_dump(mode="json"),
        tasks=variants,
    )
    augmented = label_violations(grid, augmented)

    copies = _lower_band_copies(augmented.tasks, config.lower_band_target_fraction, next_id)
    if copies:
        logger.info(f"Replicated {len(copies)} lower-band variants")
        tasks = augmented.tasks + copies
        diagnostics = augmented.diagnostics.model_copy(
            update={
                "replicated": len(copies),
                "violating": augmented.diagnostics.violating + len(copies),
                "lower_voltage": augmented.diagnostics.lower_voltage + len(copies),
                "upper_voltage": augmented.diagnostics.upper_voltage
                + sum(c.labels.upper_voltage for c in copies),
                "overload": augmented.diagnostics.overload + sum(c.labels.overload for c in copies),
            }
        )
        augmented = augmented.model_copy(update={"tasks": tasks, "diagnostics": diagnostics})

    logger.info(f"Augmented {len(dataset)} tasks into {len(augmented)} variants (seed {seed})")
    return augmented
