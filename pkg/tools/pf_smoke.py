"""Smoke test: build or load a feeder and solve one power flow at midday PV."""

from __future__ import annotations

import sys
from pathlib import Path


def _ensure_repo_on_path() -> None:
    repo_root = Path(__file__).resolve().parents[1]
    for name in ("types_shared", "grid_model", "power_flow", "opf_baseline", "scenario_gen"):
        lib_path = repo_root / "libs" / name / "src"
        if str(lib_path) not in sys.path:
            sys.path.insert(0, str(lib_path))


_ensure_repo_on_path()

from grid_model import load_grid, synthetic_feeder  # noqa: E402
from opf_baseline import violation_report  # noqa: E402
from power_flow import InjectionSet, solve_power_flow  # noqa: E402
from scenario_gen import ProfileConfig, generate_profiles  # noqa: E402


def main(argv: list[str]) -> None:
    grid = load_grid(argv[0]) if argv else synthetic_feeder(15, seed=0)
    dataset = generate_profiles(grid, ProfileConfig(n_steps=96, pv_peak=0.08), seed=0)
    noon = dataset.tasks[48]
    solution = solve_power_flow(grid, InjectionSet(p=noon.p_ref_array(), q=noon.q_ref_array()))
    report = violation_report(grid, solution)
    print(f"buses={grid.n_buses} lines={len(grid.lines)} controllable={grid.controllable_ids}")
    print(
        f"converged={solution.converged} iterations={solution.iterations} "
        f"mismatch={solution.max_mismatch:.2e}"
    )
    print(f"v_min={report.v_min:.4f} v_max={report.v_max:.4f} max_loading={report.max_loading:.3f}")


if __name__ == "__main__":
    try:
        main(sys.argv[1:])
    except Exception as exc:  # pragma: no cover - CLI ergonomics
        print(f"Smoke test failed: {exc}", file=sys.stderr)
        sys.exit(1)
