"""Discrete-event simulation of one streaming session.

The client downloads segments strictly one after another. Each download is
a fluid transfer over whatever path the controller has active, continuing
piecewise across path changes. Playback starts when the first segment has
arrived; afterwards the buffer drains at one second per second and an
empty buffer stalls playback until the in-flight segment completes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

from . import adaptation as ad
from .catalog import VideoCatalog, segment_size_kbits
from .controller import ControllerParams, RoutingController
from .netmodel import Topology, integrate, transfer_finish_time

ALGORITHMS = ("vasr", "aggressive", "sara")
STARTUP_ZONE = "startup"

SEGMENT_FIELDS = (
    "seg_index",
    "version",
    "actual_bitrate_kbps",
    "size_kbits",
    "request_time_s",
    "finish_time_s",
    "measured_throughput_kbps",
    "buffer_after_s",
    "path_id",
    "zone",
    "rerouted",
    "stall_s",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    catalog: VideoCatalog
    topology: Topology
    algorithm: str = "vasr"
    adaptation: ad.AdaptationParams = field(default_factory=ad.AdaptationParams)
    sara: ad.SaraParams = field(default_factory=ad.SaraParams)
    controller: ControllerParams = field(default_factory=ControllerParams)
    start_version: int = 0
    # lowest-quality startup lasts until the buffer first reaches this level
    startup_buffer_s: float | None = None
    echo: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not 0 <= self.start_version <= self.catalog.top_index:
            raise ConfigError(f"start_version {self.start_version} outside the version ladder")

    @property
    def startup_threshold_s(self) -> float:
        if self.startup_buffer_s is not None:
            return self.startup_buffer_s
        return self.adaptation.b_low_s

    @property
    def buffer_max_s(self) -> float:
        return self.sara.b_max_s if self.algorithm == "sara" else self.adaptation.b_max_s


@dataclass(frozen=True)
class SegmentRecord:
    seg_index: int
    version: int
    actual_bitrate_kbps: float
    size_kbits: float
    request_time_s: float
    finish_time_s: float
    measured_throughput_kbps: float
    buffer_after_s: float
    path_id: int
    zone: str
    rerouted: bool
    stall_s: float


@dataclass
class SessionLog:
    config: dict
    records: list[SegmentRecord]
    total_stall_s: float
    wall_end_s: float
    playback_start_s: float
    segment_duration_s: float
    truncated: bool = False
    path_switches: int = 0

    @property
    def final_buffer_s(self) -> float:
        return self.records[-1].buffer_after_s if self.records else 0.0


def buffer_after_download(buffer_before: float, download_time: float, segment_duration: float) -> tuple[float, float]:
    drained = min(buffer_before, download_time)
    stall = download_time - drained
    return buffer_before - drained + segment_duration, stall


def _download(ctrl: RoutingController, start: float, size: float, horizon: float) -> tuple[float, int] | None:
    """Finish time and carrying path of a transfer, or None past the horizon."""
    remaining = size
    now = start
    while True:
        ctrl.advance_to(now)
        path = ctrl.active_path
        trace = ctrl.topology.paths[path].trace
        bound = min(ctrl.next_event_time(), horizon)
        avail = integrate(trace, now, bound) if bound > now else 0.0
        if avail >= remaining:
            finish = transfer_finish_time(trace, now, remaining)
            return min(finish, bound), path
        remaining -= avail
        now = bound
        if now >= horizon:
            return None


def _decide(config: SessionConfig, state: ad.ClientState) -> ad.Decision:
    if config.algorithm == "vasr":
        return ad.vasr_decide(state, config.catalog, config.adaptation)
    if config.algorithm == "aggressive":
        return ad.aggressive_decide(state, config.catalog)
    return ad.sara_decide(state, config.catalog, config.sara)


def run_session(config: SessionConfig) -> SessionLog:
    catalog = config.catalog
    dur = catalog.segment_duration_s
    horizon = config.topology.horizon_s
    b_max = config.buffer_max_s
    ctrl = RoutingController(config.controller, config.topology)

    t = 0.0
    buffer = 0.0
    play_start = math.nan
    total_stall = 0.0
    records: list[SegmentRecord] = []
    state = ad.ClientState(0.0, config.start_version, 0.0, 0.0, 0.0, 0)
    truncated = False
    starting = True

    for seg in range(catalog.num_segments):
        if seg > 0 and starting and buffer >= config.startup_threshold_s:
            starting = False
        if not starting:
            wait = max(0.0, buffer + dur - b_max)
            t += wait
            buffer -= wait
            state = replace(state, buffer_s=buffer)
            decision = _decide(config, state)
            hold = decision.hold_until_buffer_s
            if hold is not None and buffer > hold:
                t += buffer - hold
                buffer = hold
        else:
            decision = ad.Decision(config.start_version, False, STARTUP_ZONE)

        ctrl.advance_to(t)
        if decision.reroute_requested:
            ctrl.request_reroute(t)

        version = decision.next_version
        size = segment_size_kbits(catalog, version, seg)
        outcome = _download(ctrl, t, size, horizon)
        if outcome is None:
            truncated = True
            break
        finish, path = outcome
        elapsed = finish - t
        if seg == 0:
            play_start = finish
            buffer, stall = dur, 0.0
        else:
            buffer, stall = buffer_after_download(buffer, elapsed, dur)
        total_stall += stall
        measured = size / elapsed
        records.append(
            SegmentRecord(
                seg_index=seg,
                version=version,
                actual_bitrate_kbps=catalog.bitrate(version, seg),
                size_kbits=size,
                request_time_s=t,
                finish_time_s=finish,
                measured_throughput_kbps=measured,
                buffer_after_s=buffer,
                path_id=path,
                zone=decision.zone,
                rerouted=decision.reroute_requested,
                stall_s=stall,
            )
        )
        count = seg + 1
        state = ad.ClientState(
            buffer_s=buffer,
            version_index=version,
            smoothed_throughput_kbps=ad.update_smoothed_throughput(
                state.smoothed_throughput_kbps, measured, config.adaptation.gamma, count
            ),
            last_throughput_kbps=measured,
            last_segment_bitrate_kbps=catalog.bitrate(version, seg),
            segments_downloaded=count,
            history=state.history + ((size, elapsed),),
        )
        t = finish

    return SessionLog(
        config=config.echo,
        records=records,
        total_stall_s=total_stall,
        wall_end_s=t,
        playback_start_s=play_start,
        segment_duration_s=dur,
        truncated=truncated,
        path_switches=ctrl.switch_count,
    )


def accounting_residual(log: SessionLog) -> float:
    """Wall time after playback start minus (played time + stalls).

    Zero under the fluid model for a complete session.
    """
    if not log.records:
        return 0.0
    played = len(log.records) * log.segment_duration_s - log.final_buffer_s
    end = log.records[-1].finish_time_s
    return (end - log.playback_start_s) - (played + log.total_stall_s)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def segments_csv(log: SessionLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SEGMENT_FIELDS)
    for r in log.records:
        w.writerow(
            [
                r.seg_index,
                r.version,
                _fmt(r.actual_bitrate_kbps),
                _fmt(r.size_kbits),
                _fmt(r.request_time_s),
                _fmt(r.finish_time_s),
                _fmt(r.measured_throughput_kbps),
                _fmt(r.buffer_after_s),
                r.path_id,
                r.zone,
                int(r.rerouted),
                _fmt(r.stall_s),
            ]
        )
    return buf.getvalue()


def read_segments_csv(text: str) -> list[SegmentRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != SEGMENT_FIELDS:
        raise ValueError("segments CSV header does not match the expected columns")
    out = []
    for row in reader:
        out.append(
            SegmentRecord(
                seg_index=int(row["seg_index"]),
                version=int(row["version"]),
                actual_bitrate_kbps=float(row["actual_bitrate_kbps"]),
                size_kbits=float(row["size_kbits"]),
                request_time_s=float(row["request_time_s"]),
                finish_time_s=float(row["finish_time_s"]),
                measured_throughput_kbps=float(row["measured_throughput_kbps"]),
                buffer_after_s=float(row["buffer_after_s"]),
                path_id=int(row["path_id"]),
                zone=row["zone"],
                rerouted=row["rerouted"] == "1",
                stall_s=float(row["stall_s"]),
            )
        )
    return out
