"""Simulated gNB telemetry service.

Serves the current MCS index and the matching rate estimate for a running
channel scenario over WebSocket (path ``/stats``), one JSON document per text
frame. The scenario clock either follows wall time ("real" mode, for the 1 Hz
live demo) or is advanced explicitly by tick messages ("virtual" mode, so
end-to-end runs finish in milliseconds). Any number of clients may poll
concurrently; they share one scenario and one clock.
"""

from __future__ import annotations

import threading
import time

from websockets.sync.server import serve

from . import protocol
from .channel import ChannelScenario, sample_mcs
from .errors import InvalidParameterError, ProtocolError, XradaptError
from .nr_rate import carrier_rate, format_mbps


class ScenarioClock:
    """Shared scenario time: wall-clock driven or tick driven."""

    def __init__(self, mode: str = "virtual"):
        if mode not in ("real", "virtual"):
            raise InvalidParameterError(f"clock mode must be 'real' or 'virtual', got {mode!r}")
        self.mode = mode
        self._lock = threading.Lock()
        self._virtual_time = 0.0
        self._epoch = time.monotonic()

    def now(self) -> float:
        if self.mode == "real":
            return time.monotonic() - self._epoch
        with self._lock:
            return self._virtual_time

    def advance(self, dt_s: float) -> float:
        if self.mode != "virtual":
            raise InvalidParameterError("tick is only valid in virtual clock mode")
        if dt_s < 0:
            raise InvalidParameterError(f"tick dt_s must be >= 0, got {dt_s}")
        with self._lock:
            self._virtual_time += dt_s
            return self._virtual_time


def handle_stats_request(
    scenario: ChannelScenario, duration_s: float, msg_id: int, now_s: float
) -> dict:
    """Reply for one stats request at scenario time now_s."""
    if now_s > duration_s:
        return protocol.error_reply("scenario_complete", msg_id)
    mcs = sample_mcs(scenario, now_s)
    estimate = carrier_rate(scenario.cell, mcs)
    return protocol.stats_reply(
        msg_id=msg_id,
        time_s=now_s,
        dl_mcs=mcs,
        dl_est_mbps=float(format_mbps(estimate)),
    )


class GnbService:
    """One scenario served to any number of WebSocket clients."""

    def __init__(
        self,
        scenario: ChannelScenario,
        duration_s: float,
        clock_mode: str = "virtual",
        host: str = "127.0.0.1",
        port: int = 0,
    ):
        self.scenario = scenario
        self.duration_s = duration_s
        self.clock = ScenarioClock(clock_mode)
        self._host = host
        self._port = port
        self._server = None
        self._thread = None

    def handle_text(self, text: str) -> str:
        """Process one frame and produce the reply frame.

        Errors are answered in-band; the connection is never torn down over a
        bad message.
        """
        try:
            message = protocol.parse(text)
        except ProtocolError as exc:
            return protocol.serialize(protocol.error_reply(str(exc)))
        msg_id = message.get("msg_id")
        kind = message["message"]
        try:
            if kind == "stats":
                return protocol.serialize(
                    handle_stats_request(self.scenario, self.duration_s, msg_id, self.clock.now())
                )
            if kind == "tick":
                dt = message.get("dt_s")
                if not isinstance(dt, (int, float)) or isinstance(dt, bool) or dt < 0:
                    return protocol.serialize(protocol.error_reply("tick needs dt_s >= 0", msg_id))
                if self.clock.mode != "virtual":
                    return protocol.serialize(
                        protocol.error_reply("tick only valid in virtual clock mode", msg_id)
                    )
                return protocol.serialize(protocol.tick_reply(msg_id, self.clock.advance(float(dt))))
        except XradaptError as exc:
            return protocol.serialize(protocol.error_reply(str(exc), msg_id))
        return protocol.serialize(protocol.error_reply("unknown message", msg_id))

    def _connection_handler(self, websocket):
        if websocket.request.path != "/stats":
            websocket.close(code=1008, reason="unknown path; use /stats")
            return
        for text in websocket:
            websocket.send(self.handle_text(text))

    def start(self):
        """Bind and serve in a background thread; returns the bound port."""
        try:
            self._server = serve(self._connection_handler, self._host, self._port)
        except OSError as exc:
            raise InvalidParameterError(
                f"cannot bind gNB service to {self._host}:{self._port}: {exc}"
            ) from exc
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self.bound_port

    @property
    def bound_port(self) -> int:
        return self._server.socket.getsockname()[1]

    def stop(self):
        if self._server is not None:
            self._server.shutdown()
            self._server = None

    def serve_until_interrupted(self):
        """Foreground variant for the CLI."""
        try:
            self._server = serve(self._connection_handler, self._host, self._port)
        except OSError as exc:
            raise InvalidParameterError(
                f"cannot bind gNB service to {self._host}:{self._port}: {exc}"
            ) from exc
        bound = self.bound_port
        print(f"gnb service listening on ws://{self._host}:{bound}/stats "
              f"(clock={self.clock.mode}, duration={self.duration_s}s)")
        if self.clock.mode == "real":
            # wall-clock scenarios end on their own; virtual ones are driven
            stopper = threading.Timer(self.duration_s, self._server.shutdown)
            stopper.daemon = True
            stopper.start()
        try:
            self._server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            self._server.shutdown()
