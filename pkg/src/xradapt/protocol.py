"""Wire schema for the simulated gNB telemetry endpoint.

One JSON document per WebSocket text frame. Message kinds:

  {"message": "stats", "msg_id": N}
      -> {"message": "stats", "msg_id": N, "time_s": T,
          "cells": [{"cell_id": 0, "ue": [{"ue_id": 0, "dl_mcs": M,
                                           "dl_est_mbps": R}]}]}
  {"message": "tick", "msg_id": N, "dt_s": D}   (virtual-clock mode only)
      -> {"message": "tick", "msg_id": N, "time_s": T}
  anything else
      -> {"message": "error", "msg_id": N | null, "reason": "..."}

The schema is a deliberately minimal invention for this simulator; it mirrors
the shape of a base-station monitoring API without being compatible with any
vendor's. The tick message lets one driver advance the scenario's virtual
clock in lock step while any number of observers poll stats.
"""

from __future__ import annotations

import json

from .errors import ProtocolError


def serialize(message: dict) -> str:
    return json.dumps(message, separators=(",", ":"), sort_keys=False)


def parse(text: str) -> dict:
    """Parse one frame; raises ProtocolError on malformed input."""
    try:
        message = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ProtocolError(f"malformed json: {exc}") from exc
    if not isinstance(message, dict):
        raise ProtocolError(f"message must be a json object, got {type(message).__name__}")
    if "message" not in message:
        raise ProtocolError("missing 'message' field")
    return message


def stats_request(msg_id: int) -> dict:
    return {"message": "stats", "msg_id": msg_id}


def tick_request(msg_id: int, dt_s: float) -> dict:
    return {"message": "tick", "msg_id": msg_id, "dt_s": dt_s}


def stats_reply(msg_id: int, time_s: float, dl_mcs: int, dl_est_mbps: float) -> dict:
    return {
        "message": "stats",
        "msg_id": msg_id,
        "time_s": time_s,
        "cells": [{"cell_id": 0, "ue": [{"ue_id": 0, "dl_mcs": dl_mcs, "dl_est_mbps": dl_est_mbps}]}],
    }


def tick_reply(msg_id: int, time_s: float) -> dict:
    return {"message": "tick", "msg_id": msg_id, "time_s": time_s}


def error_reply(reason: str, msg_id: int | None = None) -> dict:
    return {"message": "error", "msg_id": msg_id, "reason": reason}
