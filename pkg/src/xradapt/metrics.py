"""QoS metrics over a session timeline: switches, freezes, framerate, residency.

A freeze is a display gap that exceeds the nominal frame interval by more
than a threshold (100 ms by default); its duration is the excess over the
nominal interval, so a 277 ms emission stall registers as a 277 ms freeze.
The gap from session start to the first displayed frame is treated the same
way. F_avg is defined as the exact quotient F_tot / F_Nb.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

from .errors import InvalidParameterError
from .streaming import SessionTimeline

DEFAULT_FREEZE_EXCESS_THRESHOLD_MS = 100.0


@dataclass(frozen=True)
class FreezeEvent:
    start_s: float      # when the missing frame was due
    duration_ms: float  # gap excess over the nominal interval


@dataclass(frozen=True)
class MetricsReport:
    s_nb: int
    f_nb: int
    f_tot_ms: float
    f_avg_ms: float
    fps_avg: float
    residency: dict[str, float]

    def to_json_dict(self) -> dict:
        return {
            "s_nb": self.s_nb,
            "f_nb": self.f_nb,
            "f_tot_ms": self.f_tot_ms,
            "f_avg_ms": self.f_avg_ms,
            "fps_avg": self.fps_avg,
            "residency": self.residency,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, data: dict) -> "MetricsReport":
        return cls(
            s_nb=int(data["s_nb"]),
            f_nb=int(data["f_nb"]),
            f_tot_ms=float(data["f_tot_ms"]),
            f_avg_ms=float(data["f_avg_ms"]),
            fps_avg=float(data["fps_avg"]),
            residency={str(k): float(v) for k, v in data.get("residency", {}).items()},
        )


def detect_freezes(
    timeline: SessionTimeline,
    nominal_fps: float,
    freeze_excess_threshold_ms: float = DEFAULT_FREEZE_EXCESS_THRESHOLD_MS,
) -> list[FreezeEvent]:
    """Freezes in a timeline, sorted and non-overlapping by construction."""
    if nominal_fps <= 0:
        raise InvalidParameterError(f"nominal_fps must be positive, got {nominal_fps}")
    interval_ms = 1000.0 / nominal_fps
    display_times = [t for _, t in timeline.frame_displays]
    if not display_times:
        warnings.warn("timeline has no displayed frames; no freezes detectable", stacklevel=2)
        return []
    events: list[FreezeEvent] = []
    prev = 0.0  # session start counts as the reference for the first frame
    for t in display_times:
        gap_ms = (t - prev) * 1000.0
        excess = gap_ms - interval_ms
        if excess > freeze_excess_threshold_ms:
            events.append(FreezeEvent(start_s=prev + interval_ms / 1000.0, duration_ms=excess))
        prev = t
    return events


def compute_report(
    timeline: SessionTimeline,
    nominal_fps: float,
    freeze_excess_threshold_ms: float = DEFAULT_FREEZE_EXCESS_THRESHOLD_MS,
) -> MetricsReport:
    """Aggregate the session QoS metrics: switches, freezes, framerate, residency."""
    freezes = detect_freezes(timeline, nominal_fps, freeze_excess_threshold_ms)
    f_tot = sum(ev.duration_ms for ev in freezes)
    f_nb = len(freezes)
    duration = timeline.duration_s
    residency = {
        name: (seconds / duration if duration > 0 else 0.0)
        for name, seconds in timeline.profile_residency
    }
    return MetricsReport(
        s_nb=len(timeline.switches),
        f_nb=f_nb,
        f_tot_ms=f_tot,
        f_avg_ms=(f_tot / f_nb if f_nb else 0.0),
        fps_avg=(len(timeline.frame_displays) / duration if duration > 0 else 0.0),
        residency=residency,
    )


@dataclass(frozen=True)
class ComparisonSummary:
    baseline_f_tot_ms: float
    candidate_f_tot_ms: float
    freeze_reduction: float | None
    stall_free_f_tot_ms: float
    stall_free_reduction: float | None

    def to_json_dict(self) -> dict:
        return {
            "baseline_f_tot_ms": self.baseline_f_tot_ms,
            "candidate_f_tot_ms": self.candidate_f_tot_ms,
            "freeze_reduction": self.freeze_reduction,
            "stall_free_f_tot_ms": self.stall_free_f_tot_ms,
            "stall_free_reduction": self.stall_free_reduction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


def compare_reports(
    baseline: MetricsReport,
    candidate: MetricsReport,
    stall_ms: float = 0.0,
    stall_count: int = 0,
) -> ComparisonSummary:
    """Freeze-time reduction of candidate vs baseline, plus the stall-free hypothetical.

    The hypothetical removes stall_count * stall_ms from the candidate's total
    freeze time, modelling a renderer whose profile switches did not stall.
    With a zero baseline the reductions are undefined (None), not an error.
    """
    stall_free = candidate.f_tot_ms - stall_count * stall_ms
    if baseline.f_tot_ms == 0:
        return ComparisonSummary(baseline.f_tot_ms, candidate.f_tot_ms, None, stall_free, None)
    return ComparisonSummary(
        baseline_f_tot_ms=baseline.f_tot_ms,
        candidate_f_tot_ms=candidate.f_tot_ms,
        freeze_reduction=1.0 - candidate.f_tot_ms / baseline.f_tot_ms,
        stall_free_f_tot_ms=stall_free,
        stall_free_reduction=1.0 - stall_free / baseline.f_tot_ms,
    )
