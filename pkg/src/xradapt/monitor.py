"""Sensing half of the rate controller: polls the gNB service over WebSocket.

Each poll sends a stats request, waits for the reply with the matching
msg_id, then recomputes the rate estimate locally from the reported MCS. The
local rate model is the single source of truth: if the service's figure
disagrees beyond 1e-6 relative, the poll fails loudly with a config-skew
error instead of silently adapting to a mismatched cell profile.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from websockets.sync.client import connect

from . import protocol
from .controller import ControllerState, step
from .errors import ConfigSkewError, PollTimeoutError, ProtocolError, XradaptError
from .nr_rate import CarrierConfig, RateEstimate, estimate_rate
from .streaming import SampleRow

DEFAULT_POLL_TIMEOUT_S = 2.0
MAX_CONSECUTIVE_FAILURES = 3


@dataclass
class _MsgIds:
    next_id: int = 1

    def take(self) -> int:
        value = self.next_id
        self.next_id += 1
        return value


def _roundtrip(ws, message: dict, timeout_s: float) -> dict:
    """Send one request and wait for the reply echoing its msg_id."""
    ws.send(protocol.serialize(message))
    deadline = time.monotonic() + timeout_s
    while True:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise PollTimeoutError(f"no reply to msg_id={message['msg_id']} within {timeout_s}s")
        try:
            reply = protocol.parse(ws.recv(timeout=remaining))
        except TimeoutError:
            raise PollTimeoutError(
                f"no reply to msg_id={message['msg_id']} within {timeout_s}s"
            ) from None
        if reply.get("message") == "error" and reply.get("msg_id") in (None, message["msg_id"]):
            raise ProtocolError(f"service error: {reply.get('reason')}")
        if reply.get("msg_id") == message["msg_id"]:
            return reply


def poll_once(
    ws,
    cell: CarrierConfig,
    msg_ids: _MsgIds,
    timeout_s: float = DEFAULT_POLL_TIMEOUT_S,
) -> RateEstimate:
    """One stats poll, validated against the local rate model."""
    reply = _roundtrip(ws, protocol.stats_request(msg_ids.take()), timeout_s)
    try:
        ue = reply["cells"][0]["ue"][0]
        dl_mcs = int(ue["dl_mcs"])
        dl_est = float(ue["dl_est_mbps"])
        time_s = float(reply["time_s"])
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ProtocolError(f"stats reply missing fields: {exc}") from exc
    local = estimate_rate(cell, dl_mcs, timestamp_s=time_s)
    local_mbps = local.mbps
    if abs(local_mbps - dl_est) > 1e-6 * max(abs(local_mbps), abs(dl_est)):
        raise ConfigSkewError(
            f"estimate mismatch at mcs={dl_mcs}: service reports {dl_est} Mbps, "
            f"local model computes {local_mbps} Mbps; cell configs differ"
        )
    return local


def run_monitor_loop(
    ws,
    controller: ControllerState,
    cell: CarrierConfig,
    renderer_control: Callable[[str, float], None] | None,
    duration_s: float,
    clock_mode: str = "virtual",
    timeout_s: float = DEFAULT_POLL_TIMEOUT_S,
    max_failures: int = MAX_CONSECUTIVE_FAILURES,
    on_row: Callable[[SampleRow], None] | None = None,
) -> tuple[list[SampleRow], ControllerState]:
    """Poll/estimate/decide once per sampling period until the scenario ends.

    In virtual clock mode the loop itself drives the service clock with tick
    messages, so a 60 s session completes in milliseconds; in real mode it
    sleeps out the sampling period. Switch decisions are pushed to
    ``renderer_control(target_profile, time_s)`` when given.
    """
    period = controller.sampling_period_s
    n_samples = int(duration_s / period)
    msg_ids = _MsgIds()
    rows: list[SampleRow] = []
    failures = 0
    for i in range(n_samples):
        while True:
            try:
                estimate = poll_once(ws, cell, msg_ids, timeout_s)
                failures = 0
                break
            except PollTimeoutError as exc:
                failures += 1
                if failures >= max_failures:
                    raise PollTimeoutError(
                        f"aborting after {failures} consecutive poll failures "
                        f"at sample {i}: {exc}"
                    ) from exc
        now_s = estimate.timestamp_s
        controller, decision = step(controller, estimate, now_s)
        if decision.is_switch and renderer_control is not None:
            renderer_control(decision.target, now_s)
        row = SampleRow(
            t_s=now_s,
            mcs=estimate.mcs_indices[0],
            estimate_mbps_text=estimate.mbps_text,
            profile=controller.current_profile,
            decision=f"switch:{decision.target}" if decision.is_switch else "keep",
        )
        rows.append(row)
        if on_row is not None:
            on_row(row)
        if clock_mode == "virtual":
            _roundtrip(ws, protocol.tick_request(msg_ids.take(), period), timeout_s)
        else:
            time.sleep(period)
    return rows, controller


def open_connection(url: str, timeout_s: float = DEFAULT_POLL_TIMEOUT_S):
    """Connect to a gNB service URL; wraps connection errors as package errors."""
    try:
        return connect(url, open_timeout=timeout_s)
    except (OSError, TimeoutError) as exc:
        raise XradaptError(f"cannot connect to {url}: {exc}") from exc
