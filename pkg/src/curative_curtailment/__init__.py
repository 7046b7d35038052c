"""Root package for the curative-curtailment workspace.

Re-exports the pipeline entry points so a script can drive a whole run
through one import.
"""

from grid_model import load_grid, save_grid, synthetic_feeder
from harness import bench, evaluate, load_run_config, write_scatter
from harness.cli import main
from opf_baseline import check_feasibility, solve_opf
from power_flow import InjectionSet, solve_power_flow
from rl_agent import load_agent, run_episode, train
from scenario_gen import augment, generate_profiles, label_violations, split

__all__ = [
    "InjectionSet",
    "augment",
    "bench",
    "check_feasibility",
    "evaluate",
    "generate_profiles",
    "label_violations",
    "load_agent",
    "load_grid",
    "load_run_config",
    "main",
    "run_episode",
    "save_grid",
    "solve_opf",
    "solve_power_flow",
    "split",
    "synthetic_feeder",
    "train",
    "write_scatter",
]
