from __future__ import annotations

import logging
from collections.abc import Iterable

from grid_model import Grid
from types_shared import SupplyTask

from .models import OpfOptions, OpfSolution
from .penalty import solve_opf

logger = logging.getLogger(__name__)


def label_opf(
    grid: Grid, tasks: Iterable[SupplyTask], opts: OpfOptions | None = None
) -> list[OpfSolution]:
    """Solve the OPF for every task, in task order."""

    opts = opts or OpfOptions()
    solutions: list[OpfSolution] = []
    for task in tasks:
        solutions.append(solve_opf(grid, task, opts))
    feasible = sum(1 for s in solutions if s.feasible)
    logger.info(f"OPF labelled {len(solutions)} tasks, {feasible} feasible")
    return solutions
