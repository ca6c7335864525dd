"""Link scenarios: MCS over time plus the true capacity the link can carry.

Two sources are supported. A trace replays recorded (t, mcs) rows as a step
function. A mobility scenario converts a walked distance profile into SNR via
log-distance path loss and maps SNR linearly onto an MCS index range. Both
are immutable after construction and sampling is pure, so scenarios can be
shared freely across threads.

True capacity is the rate estimate scaled by an efficiency factor in (0, 1],
standing in for retransmissions and control signaling that the theoretical
formula does not account for; the controller always sees the unscaled
estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, InvalidParameterError, TraceRangeError
from .nr_rate import CarrierConfig, RateEstimate, carrier_rate, estimate_rate
from .tables import mcs_entries


@dataclass(frozen=True)
class MobilityTrace:
    """Waypoints (t_s, distance_m), linearly interpolated between samples."""

    waypoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise InvalidParameterError("mobility trace needs at least 2 waypoints")
        for (t0, d0), (t1, _) in zip(self.waypoints, self.waypoints[1:]):
            if t1 <= t0:
                raise InvalidParameterError(f"waypoint times not strictly increasing at t={t1}")
        for t, d in self.waypoints:
            if d < 0:
                raise InvalidParameterError(f"negative distance {d} at t={t}")


def distance_at(trace: MobilityTrace, t_s: float) -> float:
    """Piecewise-linear distance at time t; t must lie within the waypoint span."""
    first_t = trace.waypoints[0][0]
    last_t = trace.waypoints[-1][0]
    if not first_t <= t_s <= last_t:
        raise TraceRangeError(f"t={t_s} outside mobility trace range [{first_t}, {last_t}]")
    for (t0, d0), (t1, d1) in zip(trace.waypoints, trace.waypoints[1:]):
        if t_s <= t1:
            frac = (t_s - t0) / (t1 - t0)
            return d0 + frac * (d1 - d0)
    return trace.waypoints[-1][1]


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance SNR model: snr0 at 1 m, minus 10*n*log10(d)."""

    snr0_db: float = 25.0
    pathloss_exponent: float = 2.4
    min_distance_m: float = 1.0

    def __post_init__(self):
        if self.pathloss_exponent <= 0:
            raise InvalidParameterError("pathloss_exponent must be positive")
        if self.min_distance_m <= 0:
            raise InvalidParameterError("min_distance_m must be positive")


def snr_at(model: PathLossModel, d_m: float) -> float:
    if d_m < 0:
        raise InvalidParameterError(f"distance must be >= 0, got {d_m}")
    d = max(d_m, model.min_distance_m)
    return model.snr0_db - 10.0 * model.pathloss_exponent * math.log10(d)


@dataclass(frozen=True)
class SnrToMcsMap:
    """Linear SNR-to-MCS mapping, clamped to [0, max_index]."""

    snr_min_db: float = 0.0
    snr_max_db: float = 25.0
    max_index: int = 27

    def __post_init__(self):
        if self.snr_min_db >= self.snr_max_db:
            raise InvalidParameterError("snr_min_db must be below snr_max_db")
        if self.max_index < 0:
            raise InvalidParameterError("max_index must be >= 0")


def mcs_from_snr(mapping: SnrToMcsMap, snr_db: float) -> int:
    span = mapping.snr_max_db - mapping.snr_min_db
    raw = math.floor(mapping.max_index * (snr_db - mapping.snr_min_db) / span)
    return max(0, min(mapping.max_index, raw))


@dataclass(frozen=True)
class McsTrace:
    """Step-function MCS trace; each value holds until the next row's time."""

    rows: tuple[tuple[float, int], ...]

    def __post_init__(self):
        if not self.rows:
            raise InvalidParameterError("MCS trace has no rows")
        for (t0, _), (t1, _) in zip(self.rows, self.rows[1:]):
            if t1 <= t0:
                raise InvalidParameterError(f"trace times not strictly increasing at t={t1}")

    def value_at(self, t_s: float) -> int:
        if t_s < self.rows[0][0]:
            raise TraceRangeError(f"t={t_s} before first trace row at t={self.rows[0][0]}")
        value = self.rows[0][1]
        for t, mcs in self.rows:
            if t <= t_s:
                value = mcs
            else:
                break
        return value


def parse_trace_text(text: str):
    """Parse a trace file body into an McsTrace or MobilityTrace.

    Format: '#' comment lines, then a header of either `t_s,mcs` or
    `t_s,distance_m`, then one row per line.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ConfigError("trace file is empty")
    header = [col.strip() for col in lines[0].split(",")]
    rows = []
    for ln in lines[1:]:
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != 2:
            raise ConfigError(f"bad trace row {ln!r}: expected 2 columns")
        rows.append(parts)
    if header == ["t_s", "mcs"]:
        return McsTrace(tuple((float(t), int(m)) for t, m in rows))
    if header == ["t_s", "distance_m"]:
        return MobilityTrace(tuple((float(t), float(d)) for t, d in rows))
    raise ConfigError(f"unknown trace header {lines[0]!r}: expected 't_s,mcs' or 't_s,distance_m'")


@dataclass(frozen=True)
class ChannelScenario:
    """A cell plus exactly one MCS source (trace or mobility)."""

    cell: CarrierConfig
    mcs_trace: McsTrace | None = None
    mobility: MobilityTrace | None = None
    path_loss: PathLossModel | None = None
    snr_map: SnrToMcsMap | None = None
    efficiency: float = 0.93

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise InvalidParameterError(f"efficiency must be in (0, 1], got {self.efficiency}")
        trace_mode = self.mcs_trace is not None
        mobility_mode = self.mobility is not None
        if trace_mode == mobility_mode:
            raise InvalidParameterError("scenario needs exactly one of mcs_trace or mobility")
        if mobility_mode and (self.path_loss is None or self.snr_map is None):
            raise InvalidParameterError("mobility scenario needs path_loss and snr_map")
        max_idx = len(mcs_entries(self.cell.mcs_table)) - 1
        if trace_mode:
            for t, mcs in self.mcs_trace.rows:
                if not 0 <= mcs <= max_idx:
                    raise InvalidParameterError(
                        f"trace MCS {mcs} at t={t} invalid for table {self.cell.mcs_table.value}"
                    )
        else:
            if self.snr_map.max_index > max_idx:
                raise InvalidParameterError(
                    f"snr_map.max_index {self.snr_map.max_index} exceeds table "
                    f"{self.cell.mcs_table.value} range 0..{max_idx}"
                )

    @classmethod
    def from_trace(cls, cell: CarrierConfig, trace: McsTrace, efficiency: float = 0.93):
        return cls(cell=cell, mcs_trace=trace, efficiency=efficiency)

    @classmethod
    def from_mobility(
        cls,
        cell: CarrierConfig,
        mobility: MobilityTrace,
        path_loss: PathLossModel | None = None,
        snr_map: SnrToMcsMap | None = None,
        efficiency: float = 0.93,
    ):
        return cls(
            cell=cell,
            mobility=mobility,
            path_loss=path_loss or PathLossModel(),
            snr_map=snr_map or SnrToMcsMap(),
            efficiency=efficiency,
        )


def sample_mcs(scenario: ChannelScenario, t_s: float) -> int:
    """MCS index at time t (trace step value or mobility-derived)."""
    if scenario.mcs_trace is not None:
        return scenario.mcs_trace.value_at(t_s)
    d = distance_at(scenario.mobility, t_s)
    return mcs_from_snr(scenario.snr_map, snr_at(scenario.path_loss, d))


def estimate_at(scenario: ChannelScenario, t_s: float) -> RateEstimate:
    """The unscaled rate estimate the controller sees at time t."""
    return estimate_rate(scenario.cell, sample_mcs(scenario, t_s), timestamp_s=t_s)


def true_capacity(scenario: ChannelScenario, t_s: float) -> float:
    """Deliverable link rate in Mbps: efficiency times the estimate."""
    exact = carrier_rate(scenario.cell, sample_mcs(scenario, t_s))
    return float(Fraction(str(scenario.efficiency)) * exact)
