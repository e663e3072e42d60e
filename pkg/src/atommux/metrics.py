"""Evaluation metrics and their CSV wire format.

``rpr`` is the percentage change in stage count of our compiler against a
baseline (negative is better).  ``speedup`` follows the reporting
convention baseline-time over our-time, so values above 1 mean we are
faster; the plain ratio in the opposite direction is exposed as
``time_ratio`` for completeness.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

SEQUENTIAL = "sequential"
MERGED = "merged"

PAIRWISE_COLUMNS = (
    "C_map", "C_space", "Depth_map", "Depth_space",
    "T_DYNAMO", "T_DPQA_c", "T_DPQA_s",
    "Speedup_c", "Speedup_s",
    "L_DYNAMO", "L_DPQA_c", "L_DPQA_s",
    "RPR_c", "RPR_s",
    "status",
)

GROUPED_COLUMNS = (
    "circuit", "depth",
    "dL_DYNAMO", "dL_DPQA_s", "RPR_s",
    "dT_DYNAMO", "dT_DPQA_s", "Speedup_s",
    "status",
)

MULTI_COLUMNS = ("qpu", "circuit", "depth", "dL_DYNAMO", "dT_DYNAMO", "status")


class UndefinedMetricError(ValueError):
    """Metric denominator was zero."""


def rpr(l_ours: int, l_baseline: int) -> float:
    """Reduction percentage of stage count relative to a baseline."""
    if l_baseline == 0:
        raise UndefinedMetricError("baseline stage count is zero")
    return 100.0 * (l_ours - l_baseline) / l_baseline


def speedup(t_ours: float, t_baseline: float) -> float:
    """Baseline time over our time (how much faster we are)."""
    if t_ours == 0:
        raise UndefinedMetricError("our compile time is zero")
    return t_baseline / t_ours


def time_ratio(t_ours: float, t_baseline: float) -> float:
    """Our time over baseline time (reciprocal of :func:`speedup`)."""
    if t_baseline == 0:
        raise UndefinedMetricError("baseline compile time is zero")
    return t_ours / t_baseline


@dataclass(frozen=True)
class MetricRow:
    """One workload compared against one baseline scheme."""

    workload: str
    baseline_kind: str  # sequential | merged
    l_ours: int
    l_baseline: int
    t_ours: float
    t_baseline: float
    rpr: float
    speedup: float

    @classmethod
    def build(cls, workload: str, baseline_kind: str,
              l_ours: int, l_baseline: int,
              t_ours: float, t_baseline: float) -> "MetricRow":
        return cls(
            workload=workload, baseline_kind=baseline_kind,
            l_ours=l_ours, l_baseline=l_baseline,
            t_ours=t_ours, t_baseline=t_baseline,
            rpr=rpr(l_ours, l_baseline),
            speedup=speedup(t_ours, t_baseline),
        )


def write_csv(path: str, columns: tuple[str, ...], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns))
        writer.writeheader()
        for row in rows:
            writer.writerow({c: _fmt(row.get(c, "")) for c in columns})


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.2f}"
    return "" if value is None else str(value)
