"""Wire protocol: inbound operator messages and per-tick snapshots.

One JSON object per frame, canonical serialization (sorted keys, no
whitespace).  Unknown fields are ignored on input and never emitted on
output; every message carries the protocol version implicitly through
the snapshot's protocol_version field.
"""

from __future__ import annotations

import json
import math

PROTOCOL_VERSION = 1


class ProtocolError(ValueError):
    """Malformed message; carries the offending field name."""

    def __init__(self, field: str, reason: str):
        super().__init__(f"field {field!r}: {reason}")
        self.field = field
        self.reason = reason


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def _require_finite(msg: dict, field: str) -> float:
    v = msg.get(field)
    if not isinstance(v, (int, float)) or isinstance(v, bool) \
            or not math.isfinite(v):
        raise ProtocolError(field, "must be a finite number")
    return float(v)


_INBOUND_TYPES = ("head_pose", "click", "query", "reset", "cursor_target")


def parse_inbound(msg: dict) -> dict:
    """Validate one inbound message and strip unknown fields."""
    if not isinstance(msg, dict):
        raise ProtocolError("type", "message must be an object")
    mtype = msg.get("type")
    if mtype not in _INBOUND_TYPES:
        raise ProtocolError("type", f"must be one of {_INBOUND_TYPES}")
    if mtype == "head_pose":
        out = {"type": mtype}
        for f in ("roll_deg", "pitch_deg", "yaw_deg", "t_ms"):
            out[f] = _require_finite(msg, f)
        for f in ("roll_deg", "pitch_deg", "yaw_deg"):
            if not -180.0 <= out[f] <= 180.0:
                raise ProtocolError(f, "must be within [-180, 180]")
        return out
    if mtype == "click":
        action = msg.get("action")
        if action not in ("press", "release"):
            raise ProtocolError("action", "must be 'press' or 'release'")
        return {"type": mtype, "action": action,
                "t_ms": _require_finite(msg, "t_ms")}
    if mtype == "query":
        labels = msg.get("labels")
        if not isinstance(labels, list) or \
                not all(isinstance(s, str) for s in labels):
            raise ProtocolError("labels", "must be a list of strings")
        return {"type": mtype, "labels": list(labels)}
    if mtype == "cursor_target":
        style = msg.get("style")
        if style not in ("velocity", "position"):
            raise ProtocolError("style", "must be 'velocity' or 'position'")
        return {"type": mtype, "style": style}
    return {"type": "reset"}


def parse_inbound_json(raw: str) -> dict:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProtocolError("<frame>", f"invalid JSON: {exc}") from None
    return parse_inbound(msg)


def snapshot_to_json(snapshot: dict) -> str:
    return canonical_json(snapshot)


def snapshot_from_json(raw: str) -> dict:
    return json.loads(raw)
