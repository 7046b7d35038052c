"""Pipeline commands, evaluation metrics and plot data."""

from .bench import bench, read_train_timing, write_timing
from .errors import GridHashMismatchError
from .evaluation import (
    ACTED_THRESHOLD,
    build_record,
    check_artefact_grid,
    evaluate,
    evaluate_agent_task,
    evaluate_opf_task,
    read_records,
    relative_curtailment,
    summarize,
    write_records,
    write_summary,
)
from .models import CategorySummary, EvalRecord, ScatterMode, Series, SummaryTable, TimingSummary
from .scatter import SCATTER_HEADER, scatter_rows, write_scatter
from .settings import RunConfig, curtail_home, load_run_config, resolve_out

__all__ = [
    "ACTED_THRESHOLD",
    "CategorySummary",
    "EvalRecord",
    "GridHashMismatchError",
    "RunConfig",
    "SCATTER_HEADER",
    "ScatterMode",
    "Series",
    "SummaryTable",
    "TimingSummary",
    "bench",
    "build_record",
    "check_artefact_grid",
    "curtail_home",
    "evaluate",
    "evaluate_agent_task",
    "evaluate_opf_task",
    "load_run_config",
    "read_records",
    "read_train_timing",
    "relative_curtailment",
    "resolve_out",
    "scatter_rows",
    "summarize",
    "write_records",
    "write_scatter",
    "write_summary",
    "write_timing",
]
