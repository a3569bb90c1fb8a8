"""Multi-path network model with piecewise-constant path bandwidth.

Each candidate server-to-client path owns one bandwidth trace. Transfers are
fluid: a download progresses at exactly the trace rate of whichever path is
carrying it.
"""

from __future__ import annotations

import bisect
import csv
import json
import math
import pathlib
from dataclasses import dataclass, field
from typing import Sequence


class TraceError(ValueError):
    pass


class TopologyError(ValueError):
    pass


class LinkStalledError(RuntimeError):
    """A transfer cannot finish before the trace horizon."""


@dataclass(frozen=True)
class BandwidthTrace:
    times_s: tuple[float, ...]
    bandwidths_kbps: tuple[float, ...]
    horizon_s: float
    # cumulative kbits delivered at each breakpoint
    _cum: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        times, bws = self.times_s, self.bandwidths_kbps
        if not times or len(times) != len(bws):
            raise TraceError("trace needs at least one (time, bandwidth) breakpoint")
        if times[0] != 0:
            raise TraceError(f"first breakpoint must be at t=0, got {times[0]}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise TraceError("breakpoint times must be strictly increasing")
        if any(not (bw >= 0 and math.isfinite(bw)) for bw in bws):
            raise TraceError("bandwidths must be finite and >= 0")
        if not self.horizon_s > times[-1]:
            raise TraceError(f"horizon {self.horizon_s} must lie beyond the last breakpoint {times[-1]}")
        cum = [0.0]
        for k in range(1, len(times)):
            cum.append(cum[-1] + bws[k - 1] * (times[k] - times[k - 1]))
        object.__setattr__(self, "_cum", tuple(cum))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], horizon_s: float) -> BandwidthTrace:
        return cls(
            tuple(float(t) for t, _ in pairs),
            tuple(float(b) for _, b in pairs),
            float(horizon_s),
        )

    def _step(self, time: float) -> int:
        return bisect.bisect_right(self.times_s, time) - 1

    def cumulative(self, time: float) -> float:
        """Kilobits a path could carry over [0, time)."""
        k = self._step(time)
        return self._cum[k] + self.bandwidths_kbps[k] * (time - self.times_s[k])


def _check_time(trace: BandwidthTrace, time: float) -> None:
    if not 0 <= time <= trace.horizon_s:
        raise TraceError(f"time {time} outside [0, {trace.horizon_s}]")


def bandwidth_at(trace: BandwidthTrace, time: float) -> float:
    _check_time(trace, time)
    return trace.bandwidths_kbps[trace._step(time)]


def integrate(trace: BandwidthTrace, t0: float, t1: float) -> float:
    """Exact kilobits deliverable over [t0, t1)."""
    _check_time(trace, t0)
    _check_time(trace, t1)
    if t1 < t0:
        raise TraceError(f"window [{t0}, {t1}) is reversed")
    return trace.cumulative(t1) - trace.cumulative(t0)


def average_bandwidth(trace: BandwidthTrace, t0: float, t1: float) -> float:
    if not 0 <= t0 < t1 <= trace.horizon_s:
        raise TraceError(f"invalid averaging window [{t0}, {t1}) for horizon {trace.horizon_s}")
    return integrate(trace, t0, t1) / (t1 - t0)


def transfer_finish_time(trace: BandwidthTrace, start: float, size: float) -> float:
    """Earliest t with integral of bandwidth over [start, t] equal to size."""
    if not size > 0:
        raise ValueError(f"transfer size must be positive, got {size}")
    _check_time(trace, start)
    target = trace.cumulative(start) + size
    total = trace.cumulative(trace.horizon_s)
    if target > total + 1e-12 * max(1.0, size):
        raise LinkStalledError(
            f"{size:.3f} kbits from t={start} cannot complete before horizon {trace.horizon_s}"
        )
    cum = trace._cum
    # round-off must not carry a transfer that ends at a zero-rate stretch past it
    k = bisect.bisect_left(cum, target - 1e-12 * target) - 1
    if k < 0:
        k = 0
    # the step that crosses target has positive rate, else cum would be flat there
    bw = trace.bandwidths_kbps[k]
    t = trace.times_s[k] + (target - cum[k]) / bw if bw > 0 else trace.times_s[k]
    return min(max(t, start), trace.horizon_s)


@dataclass(frozen=True)
class Path:
    id: int
    hops: tuple[str, ...]
    trace: BandwidthTrace


@dataclass(frozen=True)
class Topology:
    switch_ids: tuple[str, ...]
    paths: tuple[Path, ...]
    server_attachment: str
    client_attachment: str

    def __post_init__(self):
        if not self.paths:
            raise TopologyError("topology needs at least one path")
        seen = set()
        for pos, p in enumerate(self.paths):
            if p.id != pos:
                raise TopologyError(f"path at position {pos} declares id {p.id}")
            if not p.hops:
                raise TopologyError(f"path {p.id} has no hops")
            unknown = [h for h in p.hops if h not in self.switch_ids]
            if unknown:
                raise TopologyError(f"path {p.id} uses unknown switches {unknown}")
            if p.hops[0] != self.server_attachment or p.hops[-1] != self.client_attachment:
                raise TopologyError(
                    f"path {p.id} must run {self.server_attachment} -> {self.client_attachment}"
                )
            if p.hops in seen:
                raise TopologyError(f"path {p.id} duplicates an earlier path")
            seen.add(p.hops)

    @property
    def horizon_s(self) -> float:
        return min(p.trace.horizon_s for p in self.paths)

    def __len__(self) -> int:
        return len(self.paths)


def enumerate_paths(topology: Topology) -> list[Path]:
    """Paths ordered by hop count; equal-hop paths keep declaration order."""
    return sorted(topology.paths, key=lambda p: len(p.hops))


def load_trace_csv(path: str | pathlib.Path, horizon_s: float) -> BandwidthTrace:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["time_s", "bandwidth_kbps"]:
                raise TraceError(f"{path}: header must be time_s,bandwidth_kbps")
            pairs = [(float(row["time_s"]), float(row["bandwidth_kbps"])) for row in reader]
    except OSError as exc:
        raise TraceError(f"cannot read trace {path}: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, TraceError):
            raise
        raise TraceError(f"{path}: {exc}") from exc
    return BandwidthTrace.from_pairs(pairs, horizon_s)


def write_trace_csv(trace: BandwidthTrace, path: str | pathlib.Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time_s", "bandwidth_kbps"])
        for t, bw in zip(trace.times_s, trace.bandwidths_kbps):
            w.writerow([f"{t:g}", f"{bw:g}"])


def load_scenario(path: str | pathlib.Path) -> Topology:
    """Load a topology JSON whose paths reference trace CSVs relative to it."""
    path = pathlib.Path(path)
    try:
        doc = json.loads(path.read_text())
        horizon = float(doc["horizon_s"])
        paths = tuple(
            Path(int(p["id"]), tuple(p["hops"]), load_trace_csv(path.parent / p["trace"], horizon))
            for p in doc["paths"]
        )
        return Topology(
            switch_ids=tuple(doc["switches"]),
            paths=paths,
            server_attachment=doc["server_switch"],
            client_attachment=doc["client_switch"],
        )
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise TopologyError(f"cannot load scenario {path}: {exc!r}") from exc

