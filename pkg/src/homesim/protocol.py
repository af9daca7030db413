"""Newline-delimited JSON wire protocol.

One message per line, UTF-8. Client messages carry a per-connection strictly
increasing `seq`; every one is answered by exactly one ack or error echoing
that seq. Numeric payload fields are canonicalized to 2 decimals on decode so
a persisted timeline replays to the exact same state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .environment import WEATHER_KINDS
from .errors import BadMessage, Unsupported

WORLD_TYPES = ("set_weather", "move_person", "authenticate", "override")
CONTROL_TYPES = ("step", "set_speed", "pause", "resume", "subscribe")
CLIENT_TYPES = WORLD_TYPES + CONTROL_TYPES

SERVER_TYPES = ("snapshot", "trace_event", "ack", "error")

PROPERTIES = ("power", "mode", "setpoint", "channel", "open")


@dataclass(frozen=True)
class ClientMessage:
    type: str
    seq: int
    body: dict = field(default_factory=dict)  # type-specific fields, normalized


@dataclass(frozen=True)
class ServerMessage:
    type: str
    tick: int
    payload: dict = field(default_factory=dict)
    seq: int | None = None


def _norm(value):
    if isinstance(value, float):
        return round(value, 2)
    if isinstance(value, dict):
        return {k: _norm(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_norm(v) for v in value]
    return value


def _field(doc: dict, name: str, check, what: str):
    if name not in doc:
        raise BadMessage(f"missing field '{name}'")
    value = doc[name]
    if not check(value):
        raise BadMessage(f"field '{name}' must be {what}")
    return _norm(value)


_is_str = lambda v: isinstance(v, str) and v != ""
_is_num = lambda v: isinstance(v, (int, float)) and not isinstance(v, bool)
_is_value = lambda v: isinstance(v, (str, bool, int, float))


def decode(line: str | bytes) -> ClientMessage:
    """Parse and validate one protocol line into a ClientMessage."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as err:
            raise BadMessage(f"line is not UTF-8: {err}") from err
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as err:
        raise BadMessage(f"line is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise BadMessage("message must be a JSON object")
    mtype = doc.get("type")
    if not isinstance(mtype, str):
        raise BadMessage("missing field 'type'")
    if mtype not in CLIENT_TYPES:
        raise Unsupported(f"unknown message type {mtype!r}")
    seq = doc.get("seq")
    if isinstance(seq, bool) or not isinstance(seq, int) or seq < 0:
        raise BadMessage("field 'seq' must be a non-negative integer")

    body: dict = {}
    if mtype == "set_weather":
        body["weather"] = _field(doc, "weather", lambda v: v in WEATHER_KINDS, f"one of {list(WEATHER_KINDS)}")
    elif mtype == "move_person":
        body["person"] = _field(doc, "person", _is_str, "a non-empty string")
        body["x"] = _field(doc, "x", _is_num, "a number")
        body["y"] = _field(doc, "y", _is_num, "a number")
    elif mtype == "authenticate":
        body["person"] = _field(doc, "person", _is_str, "a non-empty string")
        body["credential"] = _field(doc, "credential", lambda v: isinstance(v, str), "a string")
    elif mtype == "override":
        body["appliance"] = _field(doc, "appliance", _is_str, "a non-empty string")
        body["property"] = _field(doc, "property", lambda v: v in PROPERTIES, f"one of {list(PROPERTIES)}")
        body["value"] = _field(doc, "value", _is_value, "a scalar")
    elif mtype == "step":
        if "n" in doc:
            body["n"] = _field(doc, "n", lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 1, "an integer >= 1")
        else:
            body["n"] = 1
    elif mtype == "set_speed":
        body["tps"] = _field(doc, "tps", lambda v: _is_num(v) and v > 0, "a number > 0")
    # pause / resume / subscribe carry no fields

    known = {"type", "seq"} | set(body)
    extra = set(doc) - known
    if extra:
        raise BadMessage(f"unexpected fields {sorted(extra)}")
    return ClientMessage(mtype, seq, body)


def encode_client(msg: ClientMessage) -> str:
    doc = {"type": msg.type, "seq": msg.seq, **msg.body}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def world_command(msg: ClientMessage) -> dict:
    """Engine-facing command payload for a world-affecting message."""
    return {"type": msg.type, **msg.body}


def encode(msg: ServerMessage) -> str:
    doc = {"type": msg.type, "tick": msg.tick}
    if msg.seq is not None:
        doc["seq"] = msg.seq
    doc["payload"] = _norm(msg.payload)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def decode_server(line: str | bytes) -> ServerMessage:
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as err:
            raise BadMessage(f"line is not UTF-8: {err}") from err
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as err:
        raise BadMessage(f"line is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise BadMessage("message must be a JSON object")
    mtype = doc.get("type")
    if mtype not in SERVER_TYPES:
        raise BadMessage(f"unknown server message type {mtype!r}")
    tick = doc.get("tick")
    if isinstance(tick, bool) or not isinstance(tick, int):
        raise BadMessage("field 'tick' must be an integer")
    payload = doc.get("payload", {})
    if not isinstance(payload, dict):
        raise BadMessage("field 'payload' must be an object")
    seq = doc.get("seq")
    if seq is not None and (isinstance(seq, bool) or not isinstance(seq, int)):
        raise BadMessage("field 'seq' must be an integer")
    extra = set(doc) - {"type", "tick", "payload", "seq"}
    if extra:
        raise BadMessage(f"unexpected fields {sorted(extra)}")
    return ServerMessage(mtype, tick, payload, seq)


def ack(seq: int, tick: int) -> ServerMessage:
    return ServerMessage("ack", tick, seq=seq)


def error_reply(seq: int | None, tick: int, code: str, detail: str) -> ServerMessage:
    return ServerMessage("error", tick, {"code": code, "detail": detail}, seq=seq)
