"""Storyline layout: discretize, order, align, compact."""

from .compaction import CompactionResult, align, compact
from .discretize import discretize
from .metrics import layout_metrics
from .ordering import (
    baseline_orderings,
    crossings_between,
    order_lines,
    total_crossings,
)
from .pipeline import compute_layout, incremental_update
from .types import LayoutParams, LayoutSpec, Session, TimeStep

__all__ = [
    "CompactionResult",
    "LayoutParams",
    "LayoutSpec",
    "Session",
    "TimeStep",
    "align",
    "baseline_orderings",
    "compact",
    "compute_layout",
    "crossings_between",
    "discretize",
    "incremental_update",
    "layout_metrics",
    "order_lines",
    "total_crossings",
]
