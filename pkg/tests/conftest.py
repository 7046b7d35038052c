from __future__ import annotations

import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).resolve().parent / "fixtures"

for group in ("libs", "services"):
    root = PROJECT_ROOT / group
    if root.exists():
        for pkg_dir in sorted(root.iterdir()):
            src = pkg_dir / "src"
            if src.exists() and str(src) not in sys.path:
                sys.path.insert(0, str(src))
if str(PROJECT_ROOT / "src") not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT / "src"))

from grid_model import Grid, load_grid  # noqa: E402
from types_shared import FlexBox, SupplyTask  # noqa: E402

TaskFactory = Callable[..., SupplyTask]


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def two_bus_grid() -> Grid:
    return load_grid(FIXTURES / "two_bus.json")


@pytest.fixture
def five_bus_grid() -> Grid:
    return load_grid(FIXTURES / "five_bus.json")


def build_task(
    grid: Grid,
    p: Sequence[float],
    q: Sequence[float] | None = None,
    *,
    task_id: int = 0,
    boxes: dict[int, tuple[float, float, float, float]] | None = None,
) -> SupplyTask:
    """Supply task whose controllable boxes default to the grid's own boxes."""

    q = list(q) if q is not None else [0.0] * grid.n_buses
    boxes = boxes or {}
    flex = []
    for bus in grid.buses:
        if not bus.controllable:
            continue
        p_min, p_max, q_min, q_max = boxes.get(bus.id, (bus.p_min, bus.p_max, bus.q_min, bus.q_max))
        flex.append(FlexBox(bus=bus.id, p_min=p_min, p_max=p_max, q_min=q_min, q_max=q_max))
    return SupplyTask(
        task_id=task_id,
        timestamp=task_id,
        p_ref=[float(v) for v in p],
        q_ref=[float(v) for v in q],
        flex=flex,
    )


@pytest.fixture
def make_task() -> TaskFactory:
    return build_task


@pytest.fixture
def overload_task(five_bus_grid: Grid) -> SupplyTask:
    """PV at bus 4 feeding 0.3 p.u. through a line rated 0.2 p.u."""

    return build_task(five_bus_grid, [0.0, 0.0, 0.0, 0.0, 0.3])


@pytest.fixture
def quiet_task(five_bus_grid: Grid) -> SupplyTask:
    """Small load and PV with no violation at the uncurtailed setpoints."""

    return build_task(
        five_bus_grid,
        [0.0, -0.02, -0.02, -0.02, 0.1],
        [0.0, -0.005, -0.005, -0.005, 0.0],
        task_id=1,
        boxes={4: (0.0, 0.1, -0.1, 0.1)},
    )


@pytest.fixture
def heavy_load_task(five_bus_grid: Grid) -> SupplyTask:
    """Evening peak at the feeder end: lower band and loading both violated."""

    return build_task(
        five_bus_grid,
        [0.0, 0.0, 0.0, -0.35, -0.25],
        [0.0, 0.0, 0.0, -0.1155, -0.0825],
        task_id=2,
        boxes={4: (-0.25, -0.25, -0.1, 0.1)},
    )
