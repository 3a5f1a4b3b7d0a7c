"""Streaming epsilon-approximate quantile summaries for weighted and unweighted streams."""

from .bands import band_value, band_value_iterative, current_time, insertion_time, max_band
from .compaction import (
    CompactionRule,
    DeletionSchedule,
    DeletionStats,
    ScheduleMode,
    compute_gstar,
    deletion_step,
    flush,
    process,
    process_many,
    smoothed_step_budget,
)
from .core import (
    Algorithm,
    RankBounds,
    SummaryEntry,
    SummaryState,
    delete_entry,
    insert,
    new_summary,
    reconstruct_rank_bounds,
    resolve_ell,
)
from .oracle import CoverageReport, ExactOracle, coverage_audit
from .query import QuerySnapshot, query_quantile, query_rank, snapshot, verify_query_condition
from .streams import StreamItem, StreamSpec, generate, parse_line

__all__ = [
    "Algorithm", "CompactionRule", "CoverageReport", "DeletionSchedule", "DeletionStats",
    "ExactOracle", "QuerySnapshot", "RankBounds", "ScheduleMode", "StreamItem", "StreamSpec",
    "SummaryEntry", "SummaryState", "band_value", "band_value_iterative", "compute_gstar",
    "coverage_audit", "current_time", "delete_entry", "deletion_step", "flush", "generate",
    "insert", "insertion_time", "max_band", "new_summary", "parse_line", "process",
    "process_many", "query_quantile", "query_rank", "reconstruct_rank_bounds", "resolve_ell",
    "smoothed_step_budget", "snapshot", "verify_query_condition",
]
