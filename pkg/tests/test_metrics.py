import math
import random

import pytest

from xradapt.metrics import MetricsReport, compare_reports, compute_report, detect_freezes
from xradapt.streaming import SessionTimeline

INTERVAL = 1.0 / 60.0


def timeline_from_displays(displays, duration=None, switches=(), residency=None):
    displays = tuple((i, t) for i, t in enumerate(displays))
    duration = duration if duration is not None else (displays[-1][1] if displays else 0.0)
    residency = residency or (("Q3", duration),)
    return SessionTimeline(
        duration_s=duration,
        frame_displays=displays,
        switches=tuple(switches),
        dropped_frames=(),
        profile_residency=tuple(residency),
    )


def periodic_displays(n, start=INTERVAL, interval=INTERVAL):
    return [start + k * interval for k in range(n)]


def displays_with_gaps(gaps_ms, n_before=30, n_after=30):
    """60 fps cadence with one oversized gap planted per entry of gaps_ms."""
    times = periodic_displays(n_before)
    for gap in gaps_ms:
        times.append(times[-1] + gap / 1000.0)
        for _ in range(n_after):
            times.append(times[-1] + INTERVAL)
    return times


def test_perfectly_periodic_stream_has_no_freezes():
    tl = timeline_from_displays(periodic_displays(600))
    assert detect_freezes(tl, 60) == []


def test_single_planted_gap_matches_stall():
    # 293.67 ms gap at 60 fps: freeze of 277 ms (gap minus nominal interval)
    tl = timeline_from_displays(displays_with_gaps([293.67]))
    events = detect_freezes(tl, 60)
    assert len(events) == 1
    assert events[0].duration_ms == pytest.approx(277.0, abs=0.01)


def test_subthreshold_gaps_ignored():
    # 50 ms gaps at 60 fps (33 ms excess) stay below the 100 ms threshold
    tl = timeline_from_displays(displays_with_gaps([50.0, 50.0, 50.0]))
    assert detect_freezes(tl, 60) == []


def test_threshold_is_strict_excess():
    just_below = timeline_from_displays(displays_with_gaps([1000.0 / 60.0 + 99.99]))
    assert detect_freezes(just_below, 60) == []
    just_above = timeline_from_displays(displays_with_gaps([1000.0 / 60.0 + 100.01]))
    assert len(detect_freezes(just_above, 60)) == 1


def test_pre_first_frame_gap_counts():
    tl = timeline_from_displays(periodic_displays(60, start=0.5))
    events = detect_freezes(tl, 60)
    assert len(events) == 1
    assert events[0].duration_ms == pytest.approx(500.0 - 1000.0 / 60.0, abs=1e-6)
    assert events[0].start_s == pytest.approx(INTERVAL)


def test_empty_timeline_warns_and_yields_no_events():
    tl = timeline_from_displays([], duration=10.0)
    with pytest.warns(UserWarning, match="no displayed frames"):
        assert detect_freezes(tl, 60) == []


def test_events_sorted_and_nonoverlapping():
    tl = timeline_from_displays(displays_with_gaps([300.0, 250.0, 400.0]))
    events = detect_freezes(tl, 60)
    assert len(events) == 3
    starts = [e.start_s for e in events]
    assert starts == sorted(starts)
    for a, b in zip(events, events[1:]):
        assert a.start_s + a.duration_ms / 1000.0 <= b.start_s


def test_translation_invariance_of_interframe_freezes():
    # Shifting all displays leaves every inter-frame freeze unchanged; only
    # the session-start gap (anchored at t=0 by definition) may differ.
    base = displays_with_gaps([400.0, 220.0])
    tl = timeline_from_displays(base)
    shifted = timeline_from_displays([t + 5.0 for t in base], duration=tl.duration_s + 5.0)
    ev = [e for e in detect_freezes(tl, 60) if e.start_s > base[0]]
    ev_shifted = [e for e in detect_freezes(shifted, 60) if e.start_s > base[0] + 5.0]
    assert len(ev) == len(ev_shifted) == 2
    for a, b in zip(ev, ev_shifted):
        assert b.start_s - a.start_s == pytest.approx(5.0, abs=1e-9)
        assert b.duration_ms == pytest.approx(a.duration_ms, abs=1e-9)


def test_threshold_monotonicity_randomized():
    rng = random.Random(99)
    for _ in range(200):
        gaps = [rng.uniform(20.0, 600.0) for _ in range(rng.randint(1, 8))]
        tl = timeline_from_displays(displays_with_gaps(gaps))
        prev_nb = math.inf
        prev_tot = math.inf
        for threshold in (50.0, 100.0, 200.0, 400.0):
            events = detect_freezes(tl, 60, threshold)
            tot = sum(e.duration_ms for e in events)
            assert len(events) <= prev_nb
            assert tot <= prev_tot + 1e-9
            prev_nb, prev_tot = len(events), tot


def test_report_aggregation_arithmetic():
    # plant gaps producing freezes of 1000, 1200, 1300, 1260 ms
    excesses = [1000.0, 1200.0, 1300.0, 1260.0]
    tl = timeline_from_displays(displays_with_gaps([e + 1000.0 / 60.0 for e in excesses]))
    report = compute_report(tl, 60)
    assert report.f_nb == 4
    assert report.f_tot_ms == pytest.approx(4760.0, abs=1e-6)
    assert report.f_avg_ms == pytest.approx(1190.0, abs=1e-6)
    assert report.f_avg_ms == report.f_tot_ms / report.f_nb  # defined as the quotient
    assert report.s_nb == 0


def test_report_residency_and_fps():
    displays = periodic_displays(8400)
    tl = timeline_from_displays(
        displays,
        duration=140.0,
        switches=((77.0, "Q3", "Q2"),),
        residency=(("Q1", 15.0), ("Q2", 18.0), ("Q3", 107.0)),
    )
    report = compute_report(tl, 60)
    assert report.fps_avg == pytest.approx(60.0)
    assert report.residency["Q3"] == pytest.approx(0.7643, abs=1e-4)
    assert sum(report.residency.values()) == pytest.approx(1.0)
    assert report.s_nb == 1


def test_compare_reports_reference_totals():
    baseline = MetricsReport(0, 4, 4760.0, 1190.0, 56.12, {})
    candidate = MetricsReport(3, 6, 3930.0, 655.0, 56.51, {})
    summary = compare_reports(baseline, candidate, stall_ms=277.0, stall_count=3)
    assert summary.freeze_reduction == pytest.approx(0.174, abs=0.001)
    assert summary.stall_free_f_tot_ms == pytest.approx(3099.0)
    assert summary.stall_free_reduction == pytest.approx(0.349, abs=0.001)


def test_compare_identical_reports_is_zero():
    rep = MetricsReport(1, 2, 500.0, 250.0, 59.0, {})
    summary = compare_reports(rep, rep)
    assert summary.freeze_reduction == 0.0


def test_compare_zero_baseline_undefined():
    baseline = MetricsReport(0, 0, 0.0, 0.0, 60.0, {})
    candidate = MetricsReport(0, 1, 100.0, 100.0, 59.0, {})
    summary = compare_reports(baseline, candidate)
    assert summary.freeze_reduction is None
    assert summary.stall_free_reduction is None


def test_report_json_roundtrip():
    rep = MetricsReport(3, 6, 3930.0, 655.0, 56.51, {"Q1": 0.1, "Q2": 0.2, "Q3": 0.7})
    import json

    assert MetricsReport.from_json_dict(json.loads(rep.to_json())) == rep
