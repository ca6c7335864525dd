"""Scenario config files: strict JSON with unknown-key rejection.

A scenario bundles the cell parameters, the quality ladder, controller
settings, a channel source (MCS trace file or mobility walk) and the stream
simulation parameters. Validation is strict so golden configs stay
diff-exact: unknown keys are errors, referenced files must exist, and every
value is checked by the type it feeds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .channel import (
    ChannelScenario,
    McsTrace,
    MobilityTrace,
    PathLossModel,
    SnrToMcsMap,
    parse_trace_text,
)
from .controller import DEFAULT_LADDER, ControllerState, QualityLadder, QualityProfile, validate_ladder
from .errors import ConfigError, XradaptError
from .nr_rate import CarrierConfig
from .streaming import StreamParams
from .tables import McsTableId


def asset_path(name: str) -> Path:
    """Filesystem path of a bundled asset (testbed.json, fig4_like.csv, ...)."""
    return Path(str(resources.files(__package__).joinpath("assets", name)))


def _check_keys(obj: dict, allowed: set[str], required: set[str], context: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{context}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{context}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{context}: missing required key(s) {sorted(missing)}")


def _parse_cell(data: dict) -> CarrierConfig:
    allowed = {
        "v_layers", "mcs_table", "scaling_factor", "bandwidth_mhz", "scs_khz",
        "numerology_mu", "n_prb", "overhead", "tdd_dl_fraction",
    }
    _check_keys(data, allowed, set(), "cell")
    kwargs = dict(data)
    try:
        if "mcs_table" in kwargs:
            kwargs["mcs_table"] = McsTableId.parse(kwargs["mcs_table"])
        return CarrierConfig(**kwargs)
    except XradaptError as exc:
        raise ConfigError(f"cell: {exc}") from exc


def _parse_ladder(data: dict | None) -> QualityLadder:
    if data is None:
        return DEFAULT_LADDER
    _check_keys(data, {"profiles"}, {"profiles"}, "ladder")
    profiles = []
    for i, p in enumerate(data["profiles"]):
        _check_keys(
            p,
            {"name", "width", "height", "fps", "bitrate_mbps", "min_datarate_mbps"},
            {"name", "width", "height", "fps", "bitrate_mbps", "min_datarate_mbps"},
            f"ladder.profiles[{i}]",
        )
        profiles.append(
            QualityProfile(
                name=str(p["name"]),
                width=int(p["width"]),
                height=int(p["height"]),
                fps=float(p["fps"]),
                bitrate_mbps=float(p["bitrate_mbps"]),
                min_datarate_mbps=float(p["min_datarate_mbps"]),
            )
        )
    ladder = QualityLadder(tuple(profiles))
    try:
        validate_ladder(ladder)
    except XradaptError as exc:
        raise ConfigError(f"ladder: {exc}") from exc
    return ladder


@dataclass(frozen=True)
class ScenarioConfig:
    cell: CarrierConfig
    ladder: QualityLadder
    controller_mode: str
    sampling_period_s: float
    min_switch_interval_s: float
    fixed_profile: str | None
    scenario: ChannelScenario
    stream: StreamParams
    seed: int

    def controller_state(
        self,
        mode: str | None = None,
        fixed_profile: str | None = None,
    ) -> ControllerState:
        """Initial controller state, with optional CLI overrides."""
        effective_mode = mode or self.controller_mode
        effective_fixed = fixed_profile or self.fixed_profile
        if effective_mode == "fixed" and effective_fixed is None:
            effective_fixed = self.ladder.top.name
        return ControllerState(
            ladder=self.ladder,
            mode=effective_mode,
            fixed_profile=effective_fixed if effective_mode == "fixed" else None,
            min_switch_interval_s=self.min_switch_interval_s,
            sampling_period_s=self.sampling_period_s,
        )


def _parse_channel(data: dict, cell: CarrierConfig, efficiency: float, base_dir: Path) -> ChannelScenario:
    allowed = {
        "source", "trace_path", "waypoints", "snr0_db", "pathloss_exponent",
        "min_distance_m", "snr_min_db", "snr_max_db", "max_mcs_index",
    }
    _check_keys(data, allowed, {"source"}, "channel")
    source = data["source"]
    model_keys_used = any(
        key in data
        for key in ("snr0_db", "pathloss_exponent", "min_distance_m", "snr_min_db", "snr_max_db", "max_mcs_index")
    )

    def build_models():
        path_loss = PathLossModel(
            snr0_db=float(data.get("snr0_db", 25.0)),
            pathloss_exponent=float(data.get("pathloss_exponent", 2.4)),
            min_distance_m=float(data.get("min_distance_m", 1.0)),
        )
        snr_map = SnrToMcsMap(
            snr_min_db=float(data.get("snr_min_db", 0.0)),
            snr_max_db=float(data.get("snr_max_db", 25.0)),
            max_index=int(data.get("max_mcs_index", 27)),
        )
        return path_loss, snr_map

    if source == "trace":
        if "trace_path" not in data:
            raise ConfigError("channel: trace source needs trace_path")
        trace_path = (base_dir / data["trace_path"]).resolve()
        if not trace_path.is_file():
            raise ConfigError(f"channel: trace file not found: {trace_path}")
        trace = parse_trace_text(trace_path.read_text(encoding="utf-8"))
        if isinstance(trace, McsTrace):
            if model_keys_used:
                raise ConfigError("channel: propagation keys are only valid for distance traces")
            return ChannelScenario.from_trace(cell, trace, efficiency=efficiency)
        path_loss, snr_map = build_models()
        return ChannelScenario.from_mobility(cell, trace, path_loss, snr_map, efficiency=efficiency)
    if source == "mobility":
        if "waypoints" not in data:
            raise ConfigError("channel: mobility source needs waypoints")
        waypoints = tuple((float(t), float(d)) for t, d in data["waypoints"])
        path_loss, snr_map = build_models()
        return ChannelScenario.from_mobility(
            cell, MobilityTrace(waypoints), path_loss, snr_map, efficiency=efficiency
        )
    raise ConfigError(f"channel: unknown source {source!r}; expected 'trace' or 'mobility'")


def load_scenario_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid json: {exc}") from exc
    _check_keys(
        data,
        {"cell", "ladder", "controller", "channel", "stream", "seed"},
        {"cell", "channel"},
        str(path),
    )

    cell = _parse_cell(data["cell"])
    ladder = _parse_ladder(data.get("ladder"))

    controller = data.get("controller", {})
    _check_keys(
        controller,
        {"mode", "sampling_period_s", "min_switch_interval_s", "fixed_profile"},
        set(),
        "controller",
    )
    mode = controller.get("mode", "adaptive")
    if mode not in ("adaptive", "fixed"):
        raise ConfigError(f"controller: mode must be 'adaptive' or 'fixed', got {mode!r}")
    fixed_profile = controller.get("fixed_profile")
    if fixed_profile is not None:
        try:
            ladder.by_name(fixed_profile)
        except XradaptError as exc:
            raise ConfigError(f"controller: {exc}") from exc

    stream = data.get("stream", {})
    _check_keys(
        stream,
        {"tick_ms", "switch_stall_ms", "cap_ms", "efficiency", "freeze_excess_threshold_ms", "duration_s"},
        set(),
        "stream",
    )
    efficiency = float(stream.get("efficiency", 0.93))
    try:
        params = StreamParams(
            tick_ms=float(stream.get("tick_ms", 10.0)),
            switch_stall_ms=float(stream.get("switch_stall_ms", 277.0)),
            cap_ms=float(stream.get("cap_ms", 1000.0)),
            duration_s=float(stream.get("duration_s", 140.0)),
            freeze_excess_threshold_ms=float(stream.get("freeze_excess_threshold_ms", 100.0)),
        )
        scenario = _parse_channel(data["channel"], cell, efficiency, path.parent)
    except ConfigError:
        raise
    except XradaptError as exc:
        raise ConfigError(str(exc)) from exc

    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    return ScenarioConfig(
        cell=cell,
        ladder=ladder,
        controller_mode=mode,
        sampling_period_s=float(controller.get("sampling_period_s", 1.0)),
        min_switch_interval_s=float(controller.get("min_switch_interval_s", 3.0)),
        fixed_profile=fixed_profile,
        scenario=scenario,
        stream=params,
        seed=seed,
    )
