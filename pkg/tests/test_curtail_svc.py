from __future__ import annotations

import importlib
import sys
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from grid_model import Grid, grid_hash
from rl_agent import CurtailmentEnv, DdpgAgent, save_agent
from types_shared import SupplyTask

from conftest import FIXTURES, build_task


def _load_app():
    module_name = "curtail_svc.main"
    if module_name in sys.modules:
        del sys.modules[module_name]
    module = importlib.import_module(module_name)
    return module.app


def _full_curtailment_checkpoint(grid: Grid, path: Path, grid_id: str | None = None) -> Path:
    env = CurtailmentEnv(grid)
    agent = DdpgAgent.create(env.observation_dim, env.action_dim, 4, np.random.default_rng(0))
    last = agent.actor.layers[-1]
    last.weight[:] = 0.0
    last.bias[:] = [-40.0, 0.0]
    metadata = {"grid_hash": grid_id or grid_hash(grid), "steps_per_task": 5, "reward_lambda": 2.0, "step": 0}
    return save_agent(path, agent, metadata)


@pytest.fixture
def configured(monkeypatch: pytest.MonkeyPatch, tmp_path: Path, five_bus_grid: Grid) -> Path:
    monkeypatch.setenv("CURTAIL_GRID", str(FIXTURES / "five_bus.json"))
    checkpoint = _full_curtailment_checkpoint(five_bus_grid, tmp_path / "agent.npz")
    monkeypatch.setenv("CURTAIL_CHECKPOINT", str(checkpoint))
    return checkpoint


def _payload(task: SupplyTask) -> dict:
    return task.model_dump(mode="json")


def test_healthz() -> None:
    with TestClient(_load_app()) as client:
        response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_curtail_without_checkpoint(monkeypatch: pytest.MonkeyPatch, overload_task: SupplyTask) -> None:
    monkeypatch.setenv("CURTAIL_GRID", str(FIXTURES / "five_bus.json"))
    monkeypatch.delenv("CURTAIL_CHECKPOINT", raising=False)
    with TestClient(_load_app()) as client:
        response = client.post("/curtail", json={"task": _payload(overload_task)})
    assert response.status_code == 503


def test_curtail_resolves_overload(configured: Path, overload_task: SupplyTask) -> None:
    with TestClient(_load_app()) as client:
        response = client.post("/curtail", json={"task": _payload(overload_task)})
    assert response.status_code == 200
    body = response.json()
    assert body["p_set"] == [0.0]
    assert body["steps"] == 5
    assert body["violations"]["has_violation"] is False
    assert body["reward"] > 0.0


def test_curtail_rejects_task_of_other_shape(configured: Path, two_bus_grid: Grid) -> None:
    task = build_task(two_bus_grid, [0.0, -0.1])
    with TestClient(_load_app()) as client:
        response = client.post("/curtail", json={"task": _payload(task)})
    assert response.status_code == 400


def test_checkpoint_for_other_grid(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path, five_bus_grid: Grid, overload_task
) -> None:
    monkeypatch.setenv("CURTAIL_GRID", str(FIXTURES / "five_bus.json"))
    checkpoint = _full_curtailment_checkpoint(five_bus_grid, tmp_path / "other.npz", grid_id="0" * 64)
    monkeypatch.setenv("CURTAIL_CHECKPOINT", str(checkpoint))
    with TestClient(_load_app()) as client:
        response = client.post("/curtail", json={"task": _payload(overload_task)})
    assert response.status_code == 409


def test_opf_endpoint(configured: Path, overload_task: SupplyTask) -> None:
    with TestClient(_load_app()) as client:
        response = client.post("/opf", json={"task": _payload(overload_task)})
    assert response.status_code == 200
    body = response.json()
    assert body["feasible"] is True
    assert body["violation_report"]["overload"] is False
    assert 0.0 <= body["p_set"][0] < 0.3


def test_feasibility_endpoint(configured: Path, overload_task: SupplyTask) -> None:
    with TestClient(_load_app()) as client:
        uncurtailed = client.post(
            "/feasibility", json={"task": _payload(overload_task), "p_set": [0.3], "q_set": [0.0]}
        )
        outside = client.post(
            "/feasibility", json={"task": _payload(overload_task), "p_set": [0.5], "q_set": [0.0]}
        )
    assert uncurtailed.status_code == 200
    assert uncurtailed.json()["overload"] is True
    assert outside.status_code == 400
