"""Simulation studies: replications, summaries, output files, figures and the CLI."""

from .orchestrator import StudyOrchestrator, k_curve_overlay, k_curves_frame, red_replication
from .plots import emit_plots
from .replication import (
    ROW_COLUMNS,
    ReplicationOutcome,
    build_partition,
    estimate_k_for,
    run_replication,
    sweep_replication,
)
from .summary import summarize, summary_frame, sweep_quantiles

__all__ = [
    "ROW_COLUMNS",
    "ReplicationOutcome",
    "StudyOrchestrator",
    "build_partition",
    "emit_plots",
    "estimate_k_for",
    "k_curve_overlay",
    "k_curves_frame",
    "red_replication",
    "run_replication",
    "summarize",
    "summary_frame",
    "sweep_quantiles",
    "sweep_replication",
]
