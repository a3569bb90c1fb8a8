"""QoE statistics and empirical CDFs over a session log."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Sequence

from .adaptation import AdaptationParams
from .engine import SegmentRecord, SessionLog


@dataclass(frozen=True)
class MetricsReport:
    avg_bitrate_kbps: float
    avg_version_index: float
    avg_buffer_s: float
    frac_buffer_below_low: float
    num_switch_downs: int
    largest_switch_down_step: int
    total_stall_s: float
    num_stall_events: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CdfSeries:
    points: tuple[tuple[float, float], ...]

    def fraction_at_most(self, value: float) -> float:
        frac = 0.0
        for v, f in self.points:
            if v > value:
                break
            frac = f
        return frac


def _drain_integrals(level: float, span: float, low: float) -> tuple[float, float]:
    """Area under max(0, level - s) and time with it below ``low``, for s in [0, span]."""
    if span <= 0:
        return 0.0, 0.0
    if span <= level:
        area = level * span - 0.5 * span * span
    else:
        area = 0.5 * level * level
    below = span if level < low else max(0.0, span - (level - low))
    return area, below


def buffer_trajectory_stats(records: Sequence[SegmentRecord], b_low: float) -> tuple[float, float]:
    """Time-weighted mean buffer and fraction of time below ``b_low``.

    Between consecutive completions the buffer drains linearly from the
    recorded post-download level, flooring at zero while stalled. The
    window runs from the first completion to the last.
    """
    area = below = 0.0
    for prev, cur in zip(records, records[1:]):
        a, b = _drain_integrals(prev.buffer_after_s, cur.finish_time_s - prev.finish_time_s, b_low)
        area += a
        below += b
    span = records[-1].finish_time_s - records[0].finish_time_s
    if span <= 0:
        level = records[-1].buffer_after_s
        return level, float(level < b_low)
    return area / span, below / span


def summarize(log: SessionLog, params: AdaptationParams, per_sample: bool = False) -> MetricsReport:
    """Table-style QoE summary.

    ``per_sample`` switches the buffer statistics from the continuous
    trajectory to plain per-segment samples of ``buffer_after_s``.
    """
    recs = log.records
    if not recs:
        raise ValueError("cannot summarize an empty session log")
    n = len(recs)
    downs = [a.version - b.version for a, b in zip(recs, recs[1:]) if b.version < a.version]
    if per_sample:
        avg_buffer = math.fsum(r.buffer_after_s for r in recs) / n
        frac_low = sum(r.buffer_after_s < params.b_low_s for r in recs) / n
    else:
        avg_buffer, frac_low = buffer_trajectory_stats(recs, params.b_low_s)
    return MetricsReport(
        avg_bitrate_kbps=math.fsum(r.actual_bitrate_kbps for r in recs) / n,
        avg_version_index=sum(r.version for r in recs) / n,
        avg_buffer_s=avg_buffer,
        frac_buffer_below_low=frac_low,
        num_switch_downs=len(downs),
        largest_switch_down_step=max(downs, default=0),
        total_stall_s=log.total_stall_s,
        num_stall_events=sum(r.stall_s > 0 for r in recs),
    )


def cdf(values: Sequence[float]) -> CdfSeries:
    if len(values) == 0:
        raise ValueError("cdf of an empty sample")
    ordered = sorted(values)
    n = len(ordered)
    points = []
    for i, v in enumerate(ordered):
        if i + 1 < n and ordered[i + 1] == v:
            continue
        points.append((v, (i + 1) / n))
    return CdfSeries(tuple(points))


def cdf_csv(series: CdfSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "cum_fraction"])
    for v, f in series.points:
        w.writerow([f"{v:.6f}", f"{f:.6f}"])
    return buf.getvalue()
