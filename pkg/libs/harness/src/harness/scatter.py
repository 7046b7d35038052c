"""CSV series for the curtailment-vs-outcome scatter plots."""

from __future__ import annotations

import csv
import logging
from pathlib import Path

from grid_model import Grid, pu_to_kw

from .models import EvalRecord, ScatterMode, Series

logger = logging.getLogger(__name__)

SCATTER_HEADER = ["series", "task_id", "x", "y", "flexibility_kw", "pre_violation"]


def _point(record: EvalRecord, mode: ScatterMode) -> tuple[float | None, float]:
    if mode is ScatterMode.LOADING_VS_P:
        return record.relative_p_curtailment, record.max_loading
    if mode is ScatterMode.VMIN_VS_P:
        return record.relative_p_curtailment, record.v_min
    return record.relative_q_curtailment, record.max_loading


def scatter_rows(
    records: list[EvalRecord],
    mode: ScatterMode | str,
    grid: Grid,
    *,
    violating_only: bool = False,
) -> list[list[str]]:
    """One row per record, ordered by series then task id.

    ``x`` is left empty for a task without flexibility on that axis.
    ``violating_only`` keeps only tasks that violated before curtailment.

    Raises:
        ValueError: no records, or an unknown mode.
    """
    if not records:
        raise ValueError("scatter needs at least one evaluation record")
    mode = ScatterMode(mode)
    order = {Series.RL: 0, Series.OPF: 1}
    rows = []
    for record in sorted(records, key=lambda r: (order[r.source], r.task_id)):
        if violating_only and not record.pre_violation:
            continue
        x, y = _point(record, mode)
        rows.append(
            [
                record.source.value,
                str(record.task_id),
                "" if x is None else f"{x:.10g}",
                f"{y:.10g}",
                f"{pu_to_kw(record.flexibility, grid):.10g}",
                "1" if record.pre_violation else "0",
            ]
        )
    return rows


def write_scatter(
    records: list[EvalRecord],
    mode: ScatterMode | str,
    grid: Grid,
    path: str | Path,
    *,
    violating_only: bool = False,
) -> Path:
    rows = scatter_rows(records, mode, grid, violating_only=violating_only)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SCATTER_HEADER)
        writer.writerows(rows)
    logger.info(f"Wrote {len(rows)} scatter rows to {path}")
    return path
