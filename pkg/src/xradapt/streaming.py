"""Deterministic fluid-flow model of the renderer -> link -> client pipeline.

The renderer emits one frame every 1/fps seconds of the active profile, each
of size bitrate/fps bits. Frames enter a FIFO queue capped at ``cap_ms``
worth of the active profile's bitrate (oldest frames are dropped on
overflow) and drain at the scenario's true capacity; a frame is displayed
the moment its last bit drains. The embedded controller loop samples the
rate estimate once per sampling period; a commanded profile switch takes
effect at the start of the next tick and delays the emission schedule by
``switch_stall_ms``, which is the mechanism that turns every switch into a
display freeze of roughly that length.

Everything is advanced in fixed ticks (10 ms by default) with no hidden
randomness, so identical inputs produce byte-identical timelines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction

from .channel import ChannelScenario, sample_mcs
from .controller import ControllerState, QualityProfile, step
from .errors import InvalidParameterError
from .nr_rate import RateEstimate, carrier_rate

SERIES_HEADER = "t_s,mcs,estimate_mbps,capacity_mbps,profile,queue_bits,displayed_fps_1s"
SAMPLE_LOG_HEADER = "t_s,mcs,estimate_mbps,profile,decision"


@dataclass(frozen=True)
class StreamParams:
    tick_ms: float = 10.0
    switch_stall_ms: float = 277.0
    cap_ms: float = 1000.0
    duration_s: float = 140.0
    freeze_excess_threshold_ms: float = 100.0

    def __post_init__(self):
        if self.tick_ms <= 0:
            raise InvalidParameterError("tick_ms must be positive")
        if self.switch_stall_ms < 0:
            raise InvalidParameterError("switch_stall_ms must be >= 0")
        if self.cap_ms <= 0:
            raise InvalidParameterError("cap_ms must be positive")
        if self.duration_s <= 0:
            raise InvalidParameterError("duration_s must be positive")


@dataclass(frozen=True)
class RendererModel:
    """Emission-side state: active profile plus the pending stall window."""

    active_profile: QualityProfile
    switch_stall_ms: float = 277.0
    pending_stall_until_s: float | None = None
    next_emit_t: float = 0.0

    @property
    def frame_interval_s(self) -> float:
        return 1.0 / self.active_profile.fps

    @property
    def frame_size_bits(self) -> float:
        return self.active_profile.bitrate_mbps * 1e6 / self.active_profile.fps


def apply_profile_switch(
    renderer: RendererModel, target: QualityProfile, now_s: float
) -> RendererModel:
    """Activate a new profile and push the emission schedule by the stall.

    Switching to the already-active profile is a no-op. A forced second
    switch during an open stall window restarts the window (the schedule is
    pushed again).
    """
    if target.name == renderer.active_profile.name:
        return renderer
    stall_s = renderer.switch_stall_ms / 1000.0
    return replace(
        renderer,
        active_profile=target,
        pending_stall_until_s=now_s + stall_s,
        next_emit_t=renderer.next_emit_t + stall_s,
    )


@dataclass(frozen=True)
class SessionTimeline:
    """What happened during one simulated session."""

    duration_s: float
    frame_displays: tuple[tuple[int, float], ...]
    switches: tuple[tuple[float, str, str], ...]
    dropped_frames: tuple[int, ...]
    profile_residency: tuple[tuple[str, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "duration_s": self.duration_s,
            "frame_displays": [[i, t] for i, t in self.frame_displays],
            "switches": [[t, a, b] for t, a, b in self.switches],
            "dropped_frames": list(self.dropped_frames),
            "profile_residency": [[name, s] for name, s in self.profile_residency],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, data: dict) -> "SessionTimeline":
        return cls(
            duration_s=float(data["duration_s"]),
            frame_displays=tuple((int(i), float(t)) for i, t in data["frame_displays"]),
            switches=tuple((float(t), str(a), str(b)) for t, a, b in data["switches"]),
            dropped_frames=tuple(int(i) for i in data["dropped_frames"]),
            profile_residency=tuple((str(n), float(s)) for n, s in data["profile_residency"]),
        )


@dataclass(frozen=True)
class SampleRow:
    """One monitor-loop log row."""

    t_s: float
    mcs: int
    estimate_mbps_text: str
    profile: str
    decision: str

    def as_line(self) -> str:
        return f"{self.t_s},{self.mcs},{self.estimate_mbps_text},{self.profile},{self.decision}"


@dataclass(frozen=True)
class SessionResult:
    timeline: SessionTimeline
    series: tuple[tuple, ...]
    samples: tuple[SampleRow, ...]
    controller: ControllerState


class _Frame:
    __slots__ = ("frame_id", "emit_t", "remaining", "started")

    def __init__(self, frame_id: int, emit_t: float, size_bits: float):
        self.frame_id = frame_id
        self.emit_t = emit_t
        self.remaining = size_bits
        self.started = False  # drain begun; in-flight frames are never dropped


def run_session(
    scenario: ChannelScenario,
    controller: ControllerState,
    params: StreamParams,
) -> SessionResult:
    """Run one lock-step session under the embedded monitor/controller loop."""
    dt = params.tick_ms / 1000.0
    n_ticks = round(params.duration_s / dt)
    if abs(n_ticks * dt - params.duration_s) > 1e-9:
        raise InvalidParameterError("duration_s must be a whole number of ticks")
    ticks_per_sample = round(controller.sampling_period_s / dt)
    if ticks_per_sample < 1 or abs(ticks_per_sample * dt - controller.sampling_period_s) > 1e-9:
        raise InvalidParameterError("sampling_period_s must be a whole number of ticks")

    ladder = controller.ladder
    renderer: RendererModel | None = None
    pending: tuple[int, str] | None = None  # (effective tick, target name)

    # The channel repeats MCS values across many ticks; cache the exact rate
    # and scaled capacity per index instead of redoing rational arithmetic.
    efficiency = Fraction(str(scenario.efficiency))
    rate_cache: dict[int, Fraction] = {}
    capacity_cache: dict[int, float] = {}

    def exact_rate(mcs: int) -> Fraction:
        if mcs not in rate_cache:
            rate_cache[mcs] = carrier_rate(scenario.cell, mcs)
        return rate_cache[mcs]

    def capacity_mbps(mcs: int) -> float:
        if mcs not in capacity_cache:
            capacity_cache[mcs] = float(efficiency * exact_rate(mcs))
        return capacity_cache[mcs]

    queue: list[_Frame] = []
    queued_bits = 0.0
    next_frame_id = 0
    displays: list[tuple[int, float]] = []
    dropped: list[int] = []
    switches: list[tuple[float, str, str]] = []
    samples: list[SampleRow] = []
    series: list[tuple] = []
    residency: dict[str, float] = {p.name: 0.0 for p in ladder.profiles}
    segment_start = 0.0
    recent_displays: list[float] = []  # sliding 1 s window for the series

    def close_segment(profile_name: str, now: float):
        nonlocal segment_start
        residency[profile_name] += now - segment_start
        segment_start = now

    def shed_to_fit(cap_bits: float, incoming_bits: float) -> bool:
        """Head-drop until `incoming_bits` more fit under the cap.

        The oldest frame is dropped first, except a frame whose drain has
        begun: that one stays on the wire so recent frames keep flowing
        under sustained overload. Returns False if no room can be made.
        """
        nonlocal queued_bits
        while queued_bits + incoming_bits > cap_bits:
            idx = 1 if (queue and queue[0].started) else 0
            if idx >= len(queue):
                return False
            victim = queue.pop(idx)
            queued_bits -= victim.remaining
            dropped.append(victim.frame_id)
        return True

    for k in range(n_ticks):
        t = k * dt
        tick_end = (k + 1) * dt
        mcs = sample_mcs(scenario, t)

        # 1. A switch commanded last tick takes effect at this tick's start.
        if pending is not None and pending[0] == k:
            target = ladder.by_name(pending[1])
            if renderer is not None and target.name != renderer.active_profile.name:
                switches.append((t, renderer.active_profile.name, target.name))
                close_segment(renderer.active_profile.name, t)
                renderer = apply_profile_switch(renderer, target, t)
                # Queue cap follows the active profile; shed overflow now.
                shed_to_fit(params.cap_ms / 1000.0 * target.bitrate_mbps * 1e6, 0.0)
            pending = None

        # 2. Sample the channel and step the controller at the sampling cadence.
        if k % ticks_per_sample == 0:
            est = RateEstimate(per_carrier=(exact_rate(mcs),), mcs_indices=(mcs,), timestamp_s=t)
            controller, decision = step(controller, est, t)
            if renderer is None:
                renderer = RendererModel(
                    active_profile=ladder.by_name(controller.current_profile),
                    switch_stall_ms=params.switch_stall_ms,
                )
            if decision.is_switch:
                pending = (k + 1, decision.target)
            samples.append(
                SampleRow(
                    t_s=t,
                    mcs=mcs,
                    estimate_mbps_text=est.mbps_text,
                    profile=controller.current_profile,
                    decision=f"switch:{decision.target}" if decision.is_switch else "keep",
                )
            )

        # 3. Emit frames scheduled inside this tick (none while stalled: the
        #    switch pushed next_emit_t past the stall window).
        profile = renderer.active_profile
        size = renderer.frame_size_bits
        cap_bits = params.cap_ms / 1000.0 * profile.bitrate_mbps * 1e6
        while renderer.next_emit_t < tick_end - 1e-12:
            emit_t = renderer.next_emit_t
            if shed_to_fit(cap_bits, size):
                queue.append(_Frame(next_frame_id, emit_t, size))
                queued_bits += size
            else:
                dropped.append(next_frame_id)
            next_frame_id += 1
            renderer = replace(renderer, next_emit_t=emit_t + renderer.frame_interval_s)

        # 4. Drain the queue continuously across the tick at true capacity.
        cap_bps = capacity_mbps(mcs) * 1e6
        cursor = t
        while queue and cap_bps > 0:
            head = queue[0]
            start = max(cursor, head.emit_t)
            if start >= tick_end - 1e-12:
                break
            needed = head.remaining / cap_bps
            head.started = True
            if start + needed <= tick_end + 1e-12:
                finish = start + needed
                displays.append((head.frame_id, finish))
                recent_displays.append(finish)
                queued_bits -= head.remaining
                queue.pop(0)
                cursor = finish
            else:
                drained = (tick_end - start) * cap_bps
                head.remaining -= drained
                queued_bits -= drained
                break
        if not queue:
            queued_bits = 0.0

        while recent_displays and recent_displays[0] <= tick_end - 1.0:
            recent_displays.pop(0)
        series.append(
            (
                round(t, 9),
                mcs,
                float(exact_rate(mcs)),
                capacity_mbps(mcs),
                profile.name,
                round(queued_bits, 3),
                len(recent_displays),
            )
        )

    close_segment(renderer.active_profile.name, params.duration_s)
    assert next_frame_id == len(displays) + len(dropped) + len(queue), "frame conservation"

    timeline = SessionTimeline(
        duration_s=params.duration_s,
        frame_displays=tuple(displays),
        switches=tuple(switches),
        dropped_frames=tuple(dropped),
        profile_residency=tuple((p.name, residency[p.name]) for p in ladder.profiles),
    )
    return SessionResult(
        timeline=timeline,
        series=tuple(series),
        samples=tuple(samples),
        controller=controller,
    )


def series_to_csv(series: tuple[tuple, ...]) -> str:
    lines = [SERIES_HEADER]
    for row in series:
        lines.append(",".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def samples_to_csv(samples: tuple[SampleRow, ...]) -> str:
    lines = [SAMPLE_LOG_HEADER]
    lines.extend(row.as_line() for row in samples)
    return "\n".join(lines) + "\n"
