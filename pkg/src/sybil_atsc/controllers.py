"""Signal control policies: fixed-time, gap-actuated, and pressure-based adaptive.

All three consume the perception snapshot (never the physical queues), which
is the seam where phantom vehicles and mitigation weighting act.  The
fixed-time policy ignores observations entirely and is therefore immune to
perception corruption by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sim import PerceivedObservation, SignalState, SimConfig, World
from .traffic_model import Junction, Lane

__all__ = [
    "FixedSchedule",
    "fixed_time_decide",
    "gap_actuated_decide",
    "adaptive_decide",
    "perceived_headway",
    "FixedTimeController",
    "GapActuatedController",
    "PressureController",
    "build_controller",
    "CONTROLLER_KINDS",
]

CONTROLLER_KINDS = ("fixed", "gap_actuated", "adaptive")


@dataclass(frozen=True)
class FixedSchedule:
    """A static cyclic green schedule for one junction."""

    phase_ids: tuple[str, ...]
    durations: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.phase_ids) != len(self.durations) or not self.phase_ids:
            raise ValueError("schedule needs one duration per phase")
        if any(d <= 0.0 for d in self.durations):
            raise ValueError("phase durations must be > 0")

    @property
    def cycle(self) -> float:
        return sum(self.durations)


def fixed_time_decide(schedule: FixedSchedule, t: float) -> str:
    """Phase commanded at time t, purely from the schedule position."""
    pos = t % schedule.cycle
    acc = 0.0
    for phase_id, duration in zip(schedule.phase_ids, schedule.durations):
        acc += duration
        if pos < acc - 1e-9:
            return phase_id
    return schedule.phase_ids[-1]


def perceived_headway(obs: PerceivedObservation, lane: Lane) -> float:
    """Time gap between successive perceived vehicles on a lane.

    The perceived vehicles are spread over the lane's free-flow traversal
    window; no vehicles means an infinite gap.  Quantised to 0.1 s, the
    stop-line detector's resolution.
    """
    count = obs.counts.get(lane.id, 0.0)
    if count <= 1e-9:
        return math.inf
    window = lane.length / lane.diagram.free_speed
    return round((window / count) * 10.0) / 10.0


def gap_actuated_decide(
    signal: SignalState,
    obs: PerceivedObservation,
    junction: Junction,
    config: SimConfig,
) -> str:
    """Extend the green while any served lane still shows a tight headway.

    Bounded below by the phase's min green and above by its max green;
    otherwise the junction steps to the next phase in table order.
    """
    phase = junction.phase(signal.active_phase)
    if signal.in_yellow:
        return signal.active_phase
    if signal.phase_elapsed < phase.min_green - 1e-9:
        return signal.active_phase
    if signal.phase_elapsed >= phase.max_green - 1e-9:
        return junction.next_phase_id(signal.active_phase)
    lanes = {ln.id: ln for ln in junction.approach_lanes}
    tightest = min(
        perceived_headway(obs, lanes[lid]) for lid in phase.served_lanes
    )
    if tightest < config.max_gap:
        return signal.active_phase
    return junction.next_phase_id(signal.active_phase)


def adaptive_decide(
    junctions: tuple[Junction, ...],
    signals: dict[str, SignalState],
    obs: PerceivedObservation,
    config: SimConfig,
    due: set[str] | None = None,
) -> dict[str, str]:
    """Pick, per junction, the phase with the highest perceived pressure.

    Pressure of a phase is the sum of perceived counts on its served lanes;
    a candidate other than the active phase pays the switch penalty.  Only
    junctions in `due` (all, when None) that are past their minimum green
    and not in yellow get a command.
    """
    commands: dict[str, str] = {}
    for junction in junctions:
        if due is not None and junction.id not in due:
            continue
        sig = signals[junction.id]
        if sig.in_yellow:
            continue
        active = junction.phase(sig.active_phase)
        if sig.phase_elapsed < active.min_green - 1e-9:
            continue
        ordered = [active] + [p for p in junction.phase_table if p.id != active.id]
        if sig.phase_elapsed >= active.max_green - 1e-9 and len(ordered) > 1:
            ordered = ordered[1:]  # phase table bounds green; rotate out
        best_id = ordered[0].id
        best_pressure = -math.inf
        for phase in ordered:
            pressure = sum(obs.counts.get(lid, 0.0) for lid in phase.served_lanes)
            if phase.id != sig.active_phase:
                pressure -= config.switch_penalty
            if pressure > best_pressure + 1e-12:
                best_pressure = pressure
                best_id = phase.id
        commands[junction.id] = best_id
    return commands


class FixedTimeController:
    """Schedule-driven control; observation-independent by construction."""

    def __init__(self, network, config: SimConfig):
        self.schedules: dict[str, FixedSchedule] = {}
        for junction in network.junctions:
            n = len(junction.phase_table)
            splits = config.fixed_splits
            if len(splits) < n:
                splits = tuple(splits) + (splits[-1],) * (n - len(splits))
            self.schedules[junction.id] = FixedSchedule(
                phase_ids=tuple(p.id for p in junction.phase_table),
                durations=tuple(splits[:n]),
            )

    def decide(self, world: World, obs: PerceivedObservation, t: float) -> dict[str, str]:
        return {
            jid: fixed_time_decide(schedule, t)
            for jid, schedule in self.schedules.items()
        }


class GapActuatedController:
    def __init__(self, network, config: SimConfig):
        self.config = config

    def decide(self, world: World, obs: PerceivedObservation, t: float) -> dict[str, str]:
        commands = {}
        for junction in world.network.junctions:
            sig = world.signals[junction.id]
            commands[junction.id] = gap_actuated_decide(
                sig, obs, junction, self.config
            )
        return commands


class PressureController:
    """Adaptive policy deciding every decision_interval seconds per junction."""

    def __init__(self, network, config: SimConfig):
        self.config = config
        self._last_decision: dict[str, float] = {
            j.id: -math.inf for j in network.junctions
        }

    def decide(self, world: World, obs: PerceivedObservation, t: float) -> dict[str, str]:
        due: set[str] = set()
        for junction in world.network.junctions:
            if t - self._last_decision[junction.id] >= self.config.decision_interval - 1e-9:
                due.add(junction.id)
        commands = adaptive_decide(
            world.network.junctions, world.signals, obs, self.config, due=due
        )
        for jid in commands:
            self._last_decision[jid] = t
        return commands


def build_controller(kind: str, network, config: SimConfig):
    if kind == "fixed":
        return FixedTimeController(network, config)
    if kind == "gap_actuated":
        return GapActuatedController(network, config)
    if kind == "adaptive":
        return PressureController(network, config)
    raise ValueError(f"unknown controller kind {kind!r}; use one of {CONTROLLER_KINDS}")
