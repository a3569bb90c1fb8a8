"""Client-side bitrate adaptation: VASR and the Aggressive/SARA baselines.

Every decide function is pure. The engine owns the mutable session and hands
in a fresh ``ClientState`` snapshot before each segment request.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .catalog import VideoCatalog, segment_size_kbits

SWITCH_UP = "switch_up"
STABLE = "stable"
SWITCH_DOWN = "switch_down"
ASSISTED_SWITCH_DOWN = "assisted_switch_down"
ZONES = (SWITCH_UP, STABLE, SWITCH_DOWN, ASSISTED_SWITCH_DOWN)


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class AdaptationParams:
    b_low_s: float = 15.0
    b_high_s: float = 25.0
    b_max_s: float = 50.0
    delta0: float = 0.5
    gamma: float = 0.7
    mu: float = 0.1

    def __post_init__(self):
        if not 0 < self.b_low_s < self.b_high_s < self.b_max_s:
            raise ParamError(
                f"need 0 < b_low_s < b_high_s < b_max_s, got "
                f"b_low_s={self.b_low_s}, b_high_s={self.b_high_s}, b_max_s={self.b_max_s}"
            )
        if not 0 <= self.gamma <= 1:
            raise ParamError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0 <= self.mu < 1:
            raise ParamError(f"mu must be in [0, 1), got {self.mu}")
        if not self.delta0 > 0:
            raise ParamError(f"delta0 must be > 0, got {self.delta0}")


@dataclass(frozen=True)
class SaraParams:
    """Buffer thresholds of SARA: fast-start ``i_s``, ``b_alpha_s``, ``b_beta_s``."""

    i_s: float = 10.0
    b_alpha_s: float = 15.0
    b_beta_s: float = 25.0
    b_max_s: float = 50.0

    def __post_init__(self):
        if not 0 < self.i_s < self.b_alpha_s < self.b_beta_s < self.b_max_s:
            raise ParamError(
                f"need 0 < i_s < b_alpha_s < b_beta_s < b_max_s, got "
                f"i_s={self.i_s}, b_alpha_s={self.b_alpha_s}, "
                f"b_beta_s={self.b_beta_s}, b_max_s={self.b_max_s}"
            )


@dataclass(frozen=True)
class ClientState:
    buffer_s: float
    version_index: int
    smoothed_throughput_kbps: float
    last_throughput_kbps: float
    last_segment_bitrate_kbps: float
    segments_downloaded: int
    # (size_kbits, download_time_s) per completed segment, used by SARA
    history: tuple[tuple[float, float], ...] = field(default=())


@dataclass(frozen=True)
class Decision:
    next_version: int
    reroute_requested: bool
    zone: str
    # SARA's top zone: hold the request until the buffer has drained to this level
    hold_until_buffer_s: float | None = None


def deviation(throughput: float, segment_bitrate: float) -> float:
    if segment_bitrate == 0:
        raise ZeroDivisionError("segment bitrate is zero")
    return (throughput - segment_bitrate) / segment_bitrate


def update_smoothed_throughput(prev: float, measured: float, gamma: float, segment_count: int) -> float:
    if segment_count <= 1:
        return measured
    return (1.0 - gamma) * prev + gamma * measured


def optimal_version(catalog: VideoCatalog, smoothed_throughput: float, mu: float) -> tuple[int, float]:
    """Highest version whose average is strictly below the discounted throughput.

    Falls back to version 0 when nothing qualifies.
    """
    limit = (1.0 - mu) * smoothed_throughput
    best = 0
    for v in catalog.versions:
        if v.avg_bitrate_kbps < limit:
            best = v.index
        else:
            break
    return best, catalog.versions[best].avg_bitrate_kbps


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def adaptive_threshold(delta: float, b_low: float, b_high: float) -> float:
    return b_high - _logistic(delta) * (b_high - b_low)


def vasr_zone(buffer_s: float, delta: float, params: AdaptationParams) -> str:
    if buffer_s >= params.b_high_s:
        return SWITCH_UP
    if buffer_s < params.b_low_s:
        return ASSISTED_SWITCH_DOWN
    if buffer_s >= adaptive_threshold(delta, params.b_low_s, params.b_high_s):
        return STABLE
    return SWITCH_DOWN


def vasr_decide(state: ClientState, catalog: VideoCatalog, params: AdaptationParams) -> Decision:
    top = catalog.top_index
    current = state.version_index
    delta = deviation(state.last_throughput_kbps, state.last_segment_bitrate_kbps)
    opt_index, r_opt = optimal_version(catalog, state.smoothed_throughput_kbps, params.mu)
    r_avg = catalog.versions[current].avg_bitrate_kbps
    zone = vasr_zone(state.buffer_s, delta, params)

    nxt = current
    reroute = False
    if zone == SWITCH_UP:
        if delta > params.delta0 and r_avg < r_opt:
            nxt = current + 1
    elif zone == SWITCH_DOWN:
        if delta < -params.delta0 and (r_avg > r_opt or state.last_segment_bitrate_kbps > r_avg):
            nxt = current - 1
    elif zone == ASSISTED_SWITCH_DOWN:
        # taken as computed, even when it lands above the current version
        nxt = opt_index
        reroute = True
    return Decision(min(max(nxt, 0), top), reroute, zone)


def _direction(current: int, nxt: int) -> str:
    if nxt > current:
        return SWITCH_UP
    if nxt < current:
        return SWITCH_DOWN
    return STABLE


def aggressive_decide(state: ClientState, catalog: VideoCatalog) -> Decision:
    """Pick the highest version whose average fits the last measured throughput."""
    nxt = 0
    for v in catalog.versions:
        if v.avg_bitrate_kbps <= state.last_throughput_kbps:
            nxt = v.index
    return Decision(nxt, False, _direction(state.version_index, nxt))


def harmonic_mean_throughput(history) -> float:
    """Segment-size weighted harmonic mean of per-segment throughputs.

    With weights w_j = size_j and samples size_j / time_j this collapses to
    total size over total download time.
    """
    total_size = math.fsum(s for s, _ in history)
    total_time = math.fsum(t for _, t in history)
    if total_time <= 0:
        raise ValueError("download history has no elapsed time")
    return total_size / total_time


def sara_decide(state: ClientState, catalog: VideoCatalog, params: SaraParams) -> Decision:
    current = state.version_index
    buf = state.buffer_s
    if buf < params.i_s or not state.history:
        return Decision(0, False, _direction(current, 0))

    seg = min(state.segments_downloaded, catalog.num_segments - 1)
    est = harmonic_mean_throughput(state.history)
    slack = buf - params.i_s

    def fits(v: int) -> bool:
        return segment_size_kbits(catalog, v, seg) / est <= slack

    def best_fit() -> int:
        best = 0
        for v in range(catalog.top_index + 1):
            if fits(v):
                best = v
        return best

    hold = None
    if not fits(current):
        nxt = best_fit()
    elif buf < params.b_alpha_s:
        nxt = current + 1 if current < catalog.top_index and fits(current + 1) else current
    else:
        nxt = max(best_fit(), current)
        if buf >= params.b_beta_s:
            hold = params.b_beta_s
    return Decision(nxt, False, _direction(current, nxt), hold)
