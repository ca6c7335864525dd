"""Quality-ladder selection and the throttled profile-switch state machine.

The controller samples a data-rate estimate once per sampling period, maps it
onto the ladder and switches profile at most once every
``min_switch_interval_s`` (3 s by default). A switch desire that falls inside
the throttle window is not queued; it is re-evaluated from scratch at the next
sample, so transient dips never cause stale switches.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from .errors import InvalidParameterError, LadderError
from .nr_rate import RateEstimate


@dataclass(frozen=True)
class QualityProfile:
    name: str
    width: int
    height: int
    fps: float
    bitrate_mbps: float
    min_datarate_mbps: float


@dataclass(frozen=True)
class QualityLadder:
    """Streaming profiles ordered ascending by bitrate."""

    profiles: tuple[QualityProfile, ...]

    def by_name(self, name: str) -> QualityProfile:
        for p in self.profiles:
            if p.name == name:
                return p
        raise LadderError(f"no profile named {name!r} in ladder")

    def rank(self, name: str) -> int:
        for i, p in enumerate(self.profiles):
            if p.name == name:
                return i
        raise LadderError(f"no profile named {name!r} in ladder")

    @property
    def top(self) -> QualityProfile:
        return self.profiles[-1]


# Table-driven defaults: 720p/1080p/4K at 60 fps, thresholds 8 and 35 Mbps.
DEFAULT_LADDER = QualityLadder(
    (
        QualityProfile("Q1", 1280, 720, 60, 5.0, 0.0),
        QualityProfile("Q2", 1920, 1080, 60, 8.0, 8.0),
        QualityProfile("Q3", 3840, 2160, 60, 35.0, 35.0),
    )
)


def validate_ladder(ladder: QualityLadder) -> None:
    """Raise LadderError naming the first violated ladder invariant."""
    if not ladder.profiles:
        raise LadderError("ladder has no profiles")
    names = [p.name for p in ladder.profiles]
    if len(set(names)) != len(names):
        raise LadderError(f"duplicate profile names in ladder: {names}")
    for p in ladder.profiles:
        if p.bitrate_mbps <= 0:
            raise LadderError(f"profile {p.name}: bitrate must be positive, got {p.bitrate_mbps}")
        if p.fps <= 0:
            raise LadderError(f"profile {p.name}: fps must be positive, got {p.fps}")
    lowest = ladder.profiles[0]
    if lowest.min_datarate_mbps != 0:
        raise LadderError(
            f"lowest profile {lowest.name} must have threshold 0, got {lowest.min_datarate_mbps}"
        )
    for prev, cur in zip(ladder.profiles, ladder.profiles[1:]):
        if cur.min_datarate_mbps <= prev.min_datarate_mbps:
            raise LadderError(
                f"thresholds not strictly increasing: {prev.name}={prev.min_datarate_mbps} "
                f">= {cur.name}={cur.min_datarate_mbps}"
            )
        if cur.min_datarate_mbps < cur.bitrate_mbps:
            raise LadderError(
                f"profile {cur.name}: threshold {cur.min_datarate_mbps} below its own "
                f"bitrate {cur.bitrate_mbps}"
            )
        if cur.bitrate_mbps <= prev.bitrate_mbps:
            raise LadderError(f"profiles not ascending by bitrate at {cur.name}")


def select_profile(ladder: QualityLadder, datarate_mbps: float) -> QualityProfile:
    """Highest profile whose threshold is <= the estimate (half-open intervals).

    A rate exactly on a threshold selects the higher profile; the written
    ladder conditions use strict inequalities on both sides and leave the
    boundary unassigned, so this makes selection total and monotone.
    """
    if datarate_mbps < 0:
        raise InvalidParameterError(f"datarate must be >= 0, got {datarate_mbps}")
    chosen = ladder.profiles[0]
    for p in ladder.profiles:
        if datarate_mbps >= p.min_datarate_mbps:
            chosen = p
    return chosen


@dataclass(frozen=True)
class Decision:
    """Outcome of one controller step: `keep` or `switch` to a target profile."""

    action: str
    target: str | None = None
    effective_time_s: float | None = None

    @property
    def is_switch(self) -> bool:
        return self.action == "switch"


KEEP = Decision("keep")


@dataclass(frozen=True)
class ControllerState:
    """Immutable controller state; `step` returns an updated copy."""

    ladder: QualityLadder
    mode: str = "adaptive"  # "adaptive" | "fixed"
    fixed_profile: str | None = None
    current_profile: str | None = None
    last_switch_time_s: float | None = None
    last_step_time_s: float | None = None
    min_switch_interval_s: float = 3.0
    sampling_period_s: float = 1.0

    def __post_init__(self):
        if self.mode not in ("adaptive", "fixed"):
            raise InvalidParameterError(f"mode must be 'adaptive' or 'fixed', got {self.mode!r}")
        if self.min_switch_interval_s <= 0:
            raise InvalidParameterError("min_switch_interval_s must be positive")
        if self.sampling_period_s <= 0:
            raise InvalidParameterError("sampling_period_s must be positive")
        if self.mode == "fixed":
            if self.fixed_profile is None:
                raise InvalidParameterError("fixed mode requires fixed_profile")
            self.ladder.by_name(self.fixed_profile)
            if self.current_profile is None:
                object.__setattr__(self, "current_profile", self.fixed_profile)


def step(
    state: ControllerState,
    estimate: Union[RateEstimate, float],
    now_s: float,
) -> tuple[ControllerState, Decision]:
    """Advance the controller by one sample.

    In fixed mode the decision is always Keep. In adaptive mode the target is
    the ladder profile for the estimate; a change is issued only when the
    throttle window has elapsed (boundary closed: exactly
    min_switch_interval_s after the previous switch is allowed). The first
    sample pins the starting profile without emitting a switch.
    """
    if state.last_step_time_s is not None and now_s < state.last_step_time_s:
        raise InvalidParameterError(
            f"time regression: step at {now_s} after {state.last_step_time_s}"
        )
    state = replace(state, last_step_time_s=now_s)
    if state.mode == "fixed":
        return state, KEEP

    mbps = estimate.mbps if isinstance(estimate, RateEstimate) else float(estimate)
    target = select_profile(state.ladder, mbps).name
    if state.current_profile is None:
        return replace(state, current_profile=target), KEEP
    if target == state.current_profile:
        return state, KEEP
    throttled = (
        state.last_switch_time_s is not None
        and now_s - state.last_switch_time_s < state.min_switch_interval_s
    )
    if throttled:
        return state, KEEP
    new_state = replace(state, current_profile=target, last_switch_time_s=now_s)
    return new_state, Decision("switch", target=target, effective_time_s=now_s)
