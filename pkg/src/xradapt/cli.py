"""Command-line front end.

Subcommands: ``rate`` (evaluate the link formula), ``mcs-table`` (dump a
table with rates), ``simulate`` (run a full session and write series /
timeline / report files), ``compare`` (freeze-time reduction between two
reports), ``serve-gnb`` and ``monitor`` (the two halves of the live
split-process demo).

Exit codes: 0 success, 1 configuration or usage error, 2 unexpected runtime
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import asset_path, load_scenario_config
from .errors import ConfigError, XradaptError
from .gnb import GnbService
from .metrics import MetricsReport, compare_reports, compute_report
from .monitor import open_connection, run_monitor_loop
from .nr_rate import carrier_rate, estimate_rate, format_mbps
from .streaming import SAMPLE_LOG_HEADER, run_session, samples_to_csv, series_to_csv
from .tables import McsTableId, mcs_entries


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="xradapt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"xradapt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    default_config = str(asset_path("testbed.json"))

    p_rate = sub.add_parser("rate", help="evaluate the max data rate for MCS indices")
    p_rate.add_argument("--config", default=default_config)
    group = p_rate.add_mutually_exclusive_group(required=True)
    group.add_argument("--mcs", type=int)
    group.add_argument("--mcs-range", metavar="A..B")

    p_table = sub.add_parser("mcs-table", help="dump one MCS table with rates")
    p_table.add_argument("--table", required=True)
    p_table.add_argument("--config", default=default_config)

    p_sim = sub.add_parser("simulate", help="run a session and write outputs")
    p_sim.add_argument("--config", default=default_config)
    p_sim.add_argument("--mode", choices=["adaptive", "fixed"])
    p_sim.add_argument("--profile", help="profile pin for fixed mode")
    p_sim.add_argument("--out", default=os.environ.get("XRADAPT_OUT", "out"))
    p_sim.add_argument("--stall-ms", type=float, help="override switch stall")

    p_cmp = sub.add_parser("compare", help="freeze-time reduction between two reports")
    p_cmp.add_argument("baseline")
    p_cmp.add_argument("candidate")
    p_cmp.add_argument("--stall-ms", type=float, default=0.0)
    p_cmp.add_argument("--stall-count", type=int, default=0)

    p_serve = sub.add_parser("serve-gnb", help="serve the simulated gNB telemetry endpoint")
    p_serve.add_argument("--config", default=default_config)
    p_serve.add_argument("--bind", default=os.environ.get("XRADAPT_BIND", "127.0.0.1:8765"))
    p_serve.add_argument("--clock", choices=["real", "virtual"], default="virtual")
    p_serve.add_argument("--duration", type=float, help="scenario length override (s)")

    p_mon = sub.add_parser("monitor", help="poll a gNB service and drive the controller")
    p_mon.add_argument("--url", required=True)
    p_mon.add_argument("--config", default=default_config)
    p_mon.add_argument("--clock", choices=["real", "virtual"], default="virtual")
    p_mon.add_argument("--duration", type=float, help="seconds to monitor")

    return parser


def _cmd_rate(args) -> int:
    cfg = load_scenario_config(args.config)
    if args.mcs is not None:
        print(estimate_rate(cfg.cell, args.mcs).mbps_text)
        return 0
    try:
        lo_text, hi_text = args.mcs_range.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
    except ValueError:
        raise ConfigError(f"bad --mcs-range {args.mcs_range!r}: expected A..B") from None
    if hi < lo:
        raise ConfigError(f"bad --mcs-range {args.mcs_range!r}: B must be >= A")
    for idx in range(lo, hi + 1):
        print(f"{idx} {estimate_rate(cfg.cell, idx).mbps_text}")
    return 0


def _cmd_mcs_table(args) -> int:
    table = McsTableId.parse(args.table)
    cfg = load_scenario_config(args.config)
    cell = cfg.cell
    if cell.mcs_table != table:
        cell = replace(cell, mcs_table=table)
    print("index q_m code_rate_x1024 spectral_efficiency rate_mbps")
    for entry in mcs_entries(table):
        rate = carrier_rate(cell, entry.index)
        num = entry.code_rate * 1024
        num_text = str(int(num)) if num.denominator == 1 else str(float(num))
        print(
            f"{entry.index} {entry.q_m} {num_text} "
            f"{float(entry.spectral_efficiency):.4f} {format_mbps(rate)}"
        )
    return 0


def _cmd_simulate(args) -> int:
    cfg = load_scenario_config(args.config)
    state = cfg.controller_state(mode=args.mode, fixed_profile=args.profile)
    params = cfg.stream
    if args.stall_ms is not None:
        params = replace(params, switch_stall_ms=args.stall_ms)
    result = run_session(cfg.scenario, state, params)
    nominal_fps = max(p.fps for p in cfg.ladder.profiles)
    report = compute_report(result.timeline, nominal_fps, params.freeze_excess_threshold_ms)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "series.csv").write_text(series_to_csv(result.series), encoding="utf-8")
    (out_dir / "samples.csv").write_text(samples_to_csv(result.samples), encoding="utf-8")
    (out_dir / "timeline.json").write_text(result.timeline.to_json(), encoding="utf-8")
    (out_dir / "report.json").write_text(report.to_json(), encoding="utf-8")
    print(
        f"wrote {out_dir}/: s_nb={report.s_nb} f_nb={report.f_nb} "
        f"f_tot_ms={report.f_tot_ms:.1f} fps_avg={report.fps_avg:.2f}"
    )
    return 0


def _load_report(path: str) -> MetricsReport:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"report file not found: {p}")
    try:
        return MetricsReport.from_json_dict(json.loads(p.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"{p}: not a valid metrics report: {exc}") from exc


def _cmd_compare(args) -> int:
    baseline = _load_report(args.baseline)
    candidate = _load_report(args.candidate)
    summary = compare_reports(baseline, candidate, args.stall_ms, args.stall_count)
    print(summary.to_json(), end="")
    return 0


def _parse_bind(bind: str) -> tuple[str, int]:
    host, sep, port_text = bind.rpartition(":")
    if not sep or not port_text.isdigit():
        raise ConfigError(f"bad --bind {bind!r}: expected HOST:PORT")
    return host, int(port_text)


def _cmd_serve_gnb(args) -> int:
    cfg = load_scenario_config(args.config)
    host, port = _parse_bind(args.bind)
    duration = args.duration if args.duration is not None else cfg.stream.duration_s
    service = GnbService(cfg.scenario, duration, clock_mode=args.clock, host=host, port=port)
    service.serve_until_interrupted()
    return 0


def _cmd_monitor(args) -> int:
    cfg = load_scenario_config(args.config)
    duration = args.duration if args.duration is not None else cfg.stream.duration_s
    state = cfg.controller_state()
    print(SAMPLE_LOG_HEADER)
    with open_connection(args.url) as ws:
        run_monitor_loop(
            ws,
            state,
            cfg.cell,
            renderer_control=None,
            duration_s=duration,
            clock_mode=args.clock,
            on_row=lambda row: print(row.as_line(), flush=True),
        )
    return 0


_COMMANDS = {
    "rate": _cmd_rate,
    "mcs-table": _cmd_mcs_table,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "serve-gnb": _cmd_serve_gnb,
    "monitor": _cmd_monitor,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except XradaptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # unexpected failures are exit code 2
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
