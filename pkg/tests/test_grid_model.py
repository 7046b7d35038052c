from __future__ import annotations

import json
import math
from collections import deque
from pathlib import Path

import numpy as np
import pytest

from grid_model import (
    Bus,
    BusKind,
    Grid,
    GridParseError,
    GridValidationError,
    Line,
    build_admittance,
    grid_hash,
    load_grid,
    save_grid,
    synthetic_feeder,
    validate,
)


def _replace_bus(grid: Grid, bus_id: int, **changes) -> Grid:
    buses = [b.model_copy(update=changes) if b.id == bus_id else b for b in grid.buses]
    return grid.model_copy(update={"buses": buses})


def _bfs_reachable(grid: Grid, start: int) -> set[int]:
    neighbours: dict[int, list[int]] = {b.id: [] for b in grid.buses}
    for line in grid.lines:
        neighbours[line.from_bus].append(line.to_bus)
        neighbours[line.to_bus].append(line.from_bus)
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in neighbours[node]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def test_load_two_bus(two_bus_grid: Grid) -> None:
    assert two_bus_grid.n_buses == 2
    assert two_bus_grid.n_lines == 1
    assert two_bus_grid.slack_index == 0


def test_load_rejects_missing_slack(fixtures_dir: Path) -> None:
    with pytest.raises(GridValidationError) as excinfo:
        load_grid(fixtures_dir / "no_slack.json")
    assert "no slack bus" in str(excinfo.value)
    assert [v.rule for v in excinfo.value.violations] == ["slack_count"]


def test_five_bus_is_connected(five_bus_grid: Grid) -> None:
    assert five_bus_grid.n_buses == 5
    assert five_bus_grid.n_lines == 4
    assert _bfs_reachable(five_bus_grid, five_bus_grid.slack_index) == set(range(5))


def test_load_malformed_file(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{ not json", encoding="utf-8")
    with pytest.raises(GridParseError):
        load_grid(path)


def test_load_wrong_field_type(tmp_path: Path) -> None:
    path = tmp_path / "typed.json"
    path.write_text(json.dumps({"buses": [{"id": "zero"}], "lines": []}), encoding="utf-8")
    with pytest.raises(GridParseError):
        load_grid(path)


def test_load_missing_file(tmp_path: Path) -> None:
    with pytest.raises(GridParseError):
        load_grid(tmp_path / "absent.json")


def test_single_line_admittance(two_bus_grid: Grid) -> None:
    ybus = build_admittance(two_bus_grid).dense()
    assert ybus[0, 1] == pytest.approx(10j)
    assert ybus[1, 0] == pytest.approx(10j)
    assert ybus[0, 0] == pytest.approx(-10j)
    assert ybus[1, 1] == pytest.approx(-10j)


def test_single_bus_admittance_is_zero() -> None:
    grid = Grid(buses=[Bus(id=0, kind=BusKind.SLACK)], lines=[])
    assert validate(grid) == []
    adm = build_admittance(grid)
    assert adm.dimension == 1
    assert adm.dense().shape == (1, 1)
    assert adm.dense()[0, 0] == 0


def test_five_bus_matches_dense_assembly(five_bus_grid: Grid) -> None:
    n = five_bus_grid.n_buses
    expected = np.zeros((n, n), dtype=complex)
    for line in five_bus_grid.lines:
        y = 1.0 / complex(line.r, line.x)
        i, j = line.from_bus, line.to_bus
        expected[i, j] -= y
        expected[j, i] -= y
        expected[i, i] += y + 0.5j * line.b_shunt
        expected[j, j] += y + 0.5j * line.b_shunt
    np.testing.assert_allclose(build_admittance(five_bus_grid).dense(), expected, atol=1e-12)


def test_rows_sum_to_zero_without_shunts(five_bus_grid: Grid) -> None:
    ybus = build_admittance(five_bus_grid).dense()
    np.testing.assert_allclose(ybus.sum(axis=1), 0.0, atol=1e-12)


def test_rows_sum_to_shunt(five_bus_grid: Grid) -> None:
    lines = [line.model_copy(update={"b_shunt": 0.002}) for line in five_bus_grid.lines]
    grid = five_bus_grid.model_copy(update={"lines": lines})
    ybus = build_admittance(grid)
    degree = np.zeros(grid.n_buses)
    for line in lines:
        degree[line.from_bus] += 1
        degree[line.to_bus] += 1
    np.testing.assert_allclose(ybus.dense().sum(axis=1), 1j * 0.001 * degree, atol=1e-12)
    dense = ybus.dense()
    np.testing.assert_allclose(dense, dense.T, atol=1e-12)


def test_validate_accepts_fixture(five_bus_grid: Grid) -> None:
    assert validate(five_bus_grid) == []


def test_validate_inverted_p_box(five_bus_grid: Grid) -> None:
    grid = _replace_bus(five_bus_grid, 4, p_min=0.5)
    violations = validate(grid)
    assert len(violations) == 1
    assert violations[0].subject == "bus 4"
    assert violations[0].rule == "p_box"


def test_validate_reports_box_and_connectivity_together(five_bus_grid: Grid) -> None:
    grid = _replace_bus(five_bus_grid, 4, p_min=0.5)
    grid = grid.model_copy(update={"lines": grid.lines[:2]})
    violations = validate(grid)
    assert [(v.subject, v.rule) for v in violations] == [
        ("bus 4", "p_box"),
        ("bus 3", "connectivity"),
        ("bus 4", "connectivity"),
    ]


def test_connectivity_skipped_without_single_slack(five_bus_grid: Grid) -> None:
    grid = _replace_bus(five_bus_grid, 0, kind=BusKind.PQ)
    grid = grid.model_copy(update={"lines": grid.lines[:2]})
    assert [v.rule for v in validate(grid)] == ["slack_count"]


def test_validate_controllable_requires_observable(five_bus_grid: Grid) -> None:
    grid = _replace_bus(five_bus_grid, 4, observable=False)
    violations = validate(grid)
    assert [v.rule for v in violations] == ["controllable_observable"]
    assert violations[0].to_dict()["subject"] == "bus 4"


@pytest.mark.parametrize(
    "mutate, rule",
    [
        (lambda g: _replace_bus(g, 2, kind=BusKind.SLACK), "slack_count"),
        (lambda g: _replace_bus(g, 3, v_min=1.1), "voltage_band"),
        (lambda g: _replace_bus(g, 2, p_max=0.1), "degenerate_box"),
        (lambda g: _replace_bus(g, 4, q_min=0.2), "q_box"),
        (
            lambda g: g.model_copy(update={"lines": g.lines[:3]}),
            "connectivity",
        ),
        (
            lambda g: g.model_copy(
                update={"lines": [*g.lines[:3], Line(from_bus=3, to_bus=4, r=0.01, x=0.0, s_max=1)]}
            ),
            "line_reactance",
        ),
        (
            lambda g: g.model_copy(
                update={"lines": [*g.lines[:3], Line(from_bus=3, to_bus=4, r=-0.1, x=0.1, s_max=1)]}
            ),
            "line_resistance",
        ),
        (lambda g: g.model_copy(update={"base_mva": 0.0}), "base"),
    ],
)
def test_validate_reports_rule(five_bus_grid: Grid, mutate, rule: str) -> None:
    violations = validate(mutate(five_bus_grid))
    assert rule in {v.rule for v in violations}


@pytest.mark.parametrize("bus_id, changes", [(4, {"p_min": 0.5}), (3, {"v_max": 0.9}), (2, {"id": 7})])
def test_validate_agrees_with_load(
    five_bus_grid: Grid, tmp_path: Path, bus_id: int, changes: dict
) -> None:
    grid = _replace_bus(five_bus_grid, bus_id, **changes)
    path = save_grid(grid, tmp_path / "grid.json")
    assert validate(grid)
    with pytest.raises(GridValidationError):
        load_grid(path)


def test_save_load_round_trip(five_bus_grid: Grid, tmp_path: Path) -> None:
    path = save_grid(five_bus_grid, tmp_path / "nested" / "grid.json")
    assert load_grid(path) == five_bus_grid
    assert grid_hash(load_grid(path)) == grid_hash(five_bus_grid)


def test_grid_hash_tracks_content(five_bus_grid: Grid) -> None:
    changed = _replace_bus(five_bus_grid, 3, load_share=0.9)
    assert len(grid_hash(five_bus_grid)) == 64
    assert grid_hash(changed) != grid_hash(five_bus_grid)


@pytest.mark.parametrize("n_buses", [2, 12, 20])
def test_synthetic_feeder_structure(n_buses: int) -> None:
    grid = synthetic_feeder(n_buses, seed=3)
    assert validate(grid) == []
    assert grid.n_lines == n_buses - 1
    controllable = set(grid.controllable_ids)
    assert len(controllable) == max(1, math.ceil(0.07 * (n_buses - 1)))
    assert controllable <= set(grid.observable_ids)
    assert all(grid.buses[i].has_pv for i in controllable)
    assert _bfs_reachable(grid, 0) == set(range(n_buses))


def test_synthetic_feeder_observability_fraction() -> None:
    grid = synthetic_feeder(21, controllable_fraction=0.1, observable_fraction=0.5, seed=1)
    assert len(grid.controllable_ids) == 2
    assert len(grid.observable_ids) == 10


def test_synthetic_feeder_is_seeded() -> None:
    assert grid_hash(synthetic_feeder(15, seed=7)) == grid_hash(synthetic_feeder(15, seed=7))
    assert grid_hash(synthetic_feeder(15, seed=7)) != grid_hash(synthetic_feeder(15, seed=8))


def test_synthetic_feeder_rejects_single_bus() -> None:
    with pytest.raises(ValueError):
        synthetic_feeder(1)
