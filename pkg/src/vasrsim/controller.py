"""SDN routing policies as a time-driven state machine.

Policies: ``fixed`` (min-hop path, never changes), ``spr`` (periodic probing
of every path followed by a steady hold on the best one), ``sar`` (probing
only when the client asks for a reroute, then hold indefinitely) and
``sarm`` (``sar`` plus a threshold monitor on the active path).

The state transition functions are pure. ``RoutingController`` wraps them
with event bookkeeping for the session engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

from .netmodel import Topology, average_bandwidth, enumerate_paths

POLICIES = ("fixed", "spr", "sar", "sarm")

SWITCHING = "switching"
STEADY = "steady"
IDLE = "idle"


class ControllerError(ValueError):
    pass


@dataclass(frozen=True)
class ControllerParams:
    policy: str = "fixed"
    switch_period_s: float = 2.0
    steady_multiplier: float = 1
    monitor_threshold_kbps: float = 1000.0
    monitor_interval_s: float = 1.0

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ControllerError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if not self.switch_period_s > 0:
            raise ControllerError(f"switch_period_s must be > 0, got {self.switch_period_s}")
        if not self.steady_multiplier >= 0:
            raise ControllerError(f"steady_multiplier must be >= 0, got {self.steady_multiplier}")
        if self.policy == "sarm":
            if not self.monitor_threshold_kbps > 0:
                raise ControllerError("monitor_threshold_kbps must be > 0 for sarm")
            if not self.monitor_interval_s > 0:
                raise ControllerError("monitor_interval_s must be > 0 for sarm")


@dataclass(frozen=True)
class ControllerState:
    active_path: int
    phase: str
    probe_index: int = 0
    phase_deadline_s: float = math.inf
    measurements: Mapping[int, float] = field(default_factory=dict)


def select_best_path(measurements: Mapping[int, float]) -> int:
    if not measurements:
        raise ControllerError("no path measurements to choose from")
    # max() keeps the first maximum, so sort ids to break ties toward the lowest
    return max(sorted(measurements), key=lambda pid: measurements[pid])


def spr_cycle_length(n: int, alpha: float, t: float) -> float:
    return (n + alpha) * t


def fixed_path(topology: Topology) -> int:
    return enumerate_paths(topology)[0].id


def initial_state(params: ControllerParams, topology: Topology) -> ControllerState:
    if params.policy == "spr":
        return _start_switching(0.0, params)
    return ControllerState(active_path=fixed_path(topology), phase=IDLE)


def _start_switching(now: float, params: ControllerParams) -> ControllerState:
    return ControllerState(
        active_path=0,
        phase=SWITCHING,
        probe_index=0,
        phase_deadline_s=now + params.switch_period_s,
        measurements={},
    )


def _step(state: ControllerState, params: ControllerParams, topology: Topology) -> ControllerState:
    """Apply the single transition that fires at ``state.phase_deadline_s``."""
    at = state.phase_deadline_s
    t = params.switch_period_s
    if state.phase == SWITCHING:
        trace = topology.paths[state.probe_index].trace
        measured = dict(state.measurements)
        measured[state.probe_index] = average_bandwidth(trace, at - t, at)
        nxt = state.probe_index + 1
        if nxt < len(topology):
            return replace(state, active_path=nxt, probe_index=nxt, phase_deadline_s=at + t, measurements=measured)
        best = select_best_path(measured)
        if params.policy != "spr":
            return ControllerState(best, IDLE, state.probe_index, math.inf, measured)
        hold = params.steady_multiplier * t
        if hold > 0:
            return ControllerState(best, STEADY, state.probe_index, at + hold, measured)
        return replace(_start_switching(at, params), measurements=measured)
    if state.phase == STEADY:
        return replace(_start_switching(at, params), measurements=state.measurements)
    return state


def advance(state: ControllerState, params: ControllerParams, now: float, topology: Topology) -> ControllerState:
    """Process every phase boundary at or before ``now``."""
    while state.phase != IDLE and state.phase_deadline_s <= now:
        state = _step(state, params, topology)
    return state


def spr_tick(
    state: ControllerState, params: ControllerParams, now: float, topology: Topology
) -> tuple[ControllerState, int]:
    if params.policy != "spr":
        raise ControllerError("spr_tick requires policy 'spr'")
    state = advance(state, params, now, topology)
    return state, state.active_path


def sar_on_request(
    state: ControllerState, params: ControllerParams, now: float, topology: Topology
) -> ControllerState:
    if params.policy not in ("sar", "sarm"):
        raise ControllerError("reroute requests are handled only by sar/sarm")
    state = advance(state, params, now, topology)
    if state.phase == SWITCHING:
        return state
    return _start_switching(now, params)


def sarm_monitor(
    state: ControllerState, params: ControllerParams, now: float, topology: Topology
) -> ControllerState:
    if params.policy != "sarm":
        raise ControllerError("sarm_monitor requires policy 'sarm'")
    state = advance(state, params, now, topology)
    if state.phase != IDLE:
        return state
    t0 = max(0.0, now - params.monitor_interval_s)
    if now <= t0:
        return state
    rate = average_bandwidth(topology.paths[state.active_path].trace, t0, now)
    if rate < params.monitor_threshold_kbps:
        return _start_switching(now, params)
    return state


class RoutingController:
    """Owns one session's controller state and exposes its event schedule."""

    def __init__(self, params: ControllerParams, topology: Topology):
        self.params = params
        self.topology = topology
        self.state = initial_state(params, topology)
        self.switch_count = 0
        self._ticks = 1 if params.policy == "sarm" else None

    @property
    def _next_monitor(self) -> float:
        if self._ticks is None:
            return math.inf
        return self._ticks * self.params.monitor_interval_s

    @property
    def active_path(self) -> int:
        return self.state.active_path

    def next_event_time(self) -> float:
        deadline = self.state.phase_deadline_s if self.state.phase != IDLE else math.inf
        return min(deadline, self._next_monitor)

    def _set(self, new: ControllerState) -> None:
        if new.active_path != self.state.active_path:
            self.switch_count += 1
        self.state = new

    def advance_to(self, now: float) -> None:
        while True:
            nxt = self.next_event_time()
            if nxt > now:
                return
            if self.state.phase != IDLE and self.state.phase_deadline_s <= self._next_monitor:
                self._set(_step(self.state, self.params, self.topology))
            else:
                tick = self._next_monitor
                self._ticks += 1
                self._set(sarm_monitor(self.state, self.params, tick, self.topology))

    def request_reroute(self, now: float) -> None:
        """Client entry point; ignored by policies that do not take requests."""
        self.advance_to(now)
        if self.params.policy in ("sar", "sarm"):
            self._set(sar_on_request(self.state, self.params, now, self.topology))
