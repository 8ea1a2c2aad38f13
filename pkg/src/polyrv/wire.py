"""Wire protocol between component listeners and the central monitor.

Frames are a 4-byte big-endian length prefix followed by exactly that
many bytes of UTF-8 JSON encoding one message. Encoding is canonical —
`kind` first, `seq` second, remaining fields alphabetically, params/args
maps with sorted keys, no whitespace — so equal messages encode to
identical bytes in every adapter language.

Per connection the sender's `seq` strictly increases; `request_id` in a
COND_RESP/ACT_ACK must echo an outstanding COND_REQ/ACT_REQ. EVENTs flow
component->monitor; COND_REQ/ACT_REQ flow monitor->component with at most
one outstanding request per connection.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import DecodeError, EncodeError

PROTOCOL_VERSION = "1"
MAX_FRAME_BYTES = 1 << 20  # 1 MiB
DEFAULT_PORT = 7483

SEVERITY_INFO = "info"
SEVERITY_VIOLATION = "violation"
_SEVERITIES = (SEVERITY_INFO, SEVERITY_VIOLATION)


def _require_str(value: object, what: str) -> str:
    if type(value) is not str:
        raise ValueError(f"{what} must be a string")
    return value


def _require_int(value: object, what: str) -> int:
    if type(value) is not int:
        raise ValueError(f"{what} must be an integer")
    if value < 0:
        raise ValueError(f"{what} must be non-negative")
    return value


def _require_str_map(value: object, what: str) -> dict:
    if not isinstance(value, Mapping):
        raise ValueError(f"{what} must be a mapping")
    for k, v in value.items():
        _require_str(k, f"{what} key")
        _require_str(v, f"{what}[{k!r}]")
    return dict(value)


@dataclass(frozen=True)
class Hello:
    component_label: str
    protocol_version: str = PROTOCOL_VERSION
    seq: int = 0

    def __post_init__(self):
        _require_str(self.component_label, "component_label")
        if not self.component_label:
            raise ValueError("component_label must be non-empty")
        _require_str(self.protocol_version, "protocol_version")
        _require_int(self.seq, "seq")

    kind = "HELLO"

    def _body(self) -> list[tuple[str, object]]:
        return [("component_label", self.component_label),
                ("protocol_version", self.protocol_version)]


@dataclass(frozen=True)
class Event:
    event_name: str
    context_key: str
    params: Mapping[str, str] = field(default_factory=dict)
    seq: int = 0

    def __post_init__(self):
        _require_str(self.event_name, "event_name")
        if not _require_str(self.context_key, "context_key"):
            raise ValueError("context_key must be non-empty")
        object.__setattr__(self, "params", _require_str_map(self.params, "params"))
        _require_int(self.seq, "seq")

    kind = "EVENT"

    def _body(self) -> list[tuple[str, object]]:
        return [("context_key", self.context_key),
                ("event_name", self.event_name),
                ("params", dict(sorted(self.params.items())))]


@dataclass(frozen=True)
class CondReq:
    request_id: int
    condition_name: str
    context_key: str
    args: Mapping[str, str] = field(default_factory=dict)
    seq: int = 0

    def __post_init__(self):
        _require_int(self.request_id, "request_id")
        _require_str(self.condition_name, "condition_name")
        if not _require_str(self.context_key, "context_key"):
            raise ValueError("context_key must be non-empty")
        object.__setattr__(self, "args", _require_str_map(self.args, "args"))
        _require_int(self.seq, "seq")

    kind = "COND_REQ"

    def _body(self) -> list[tuple[str, object]]:
        return [("args", dict(sorted(self.args.items()))),
                ("condition_name", self.condition_name),
                ("context_key", self.context_key),
                ("request_id", self.request_id)]


@dataclass(frozen=True)
class CondResp:
    request_id: int
    result: bool
    seq: int = 0

    def __post_init__(self):
        _require_int(self.request_id, "request_id")
        if type(self.result) is not bool:
            raise ValueError("result must be a boolean")
        _require_int(self.seq, "seq")

    kind = "COND_RESP"

    def _body(self) -> list[tuple[str, object]]:
        return [("request_id", self.request_id), ("result", self.result)]


@dataclass(frozen=True)
class ActReq:
    request_id: int
    action_name: str
    context_key: str
    args: Mapping[str, str] = field(default_factory=dict)
    seq: int = 0

    def __post_init__(self):
        _require_int(self.request_id, "request_id")
        _require_str(self.action_name, "action_name")
        if not _require_str(self.context_key, "context_key"):
            raise ValueError("context_key must be non-empty")
        object.__setattr__(self, "args", _require_str_map(self.args, "args"))
        _require_int(self.seq, "seq")

    kind = "ACT_REQ"

    def _body(self) -> list[tuple[str, object]]:
        return [("action_name", self.action_name),
                ("args", dict(sorted(self.args.items()))),
                ("context_key", self.context_key),
                ("request_id", self.request_id)]


@dataclass(frozen=True)
class ActAck:
    request_id: int
    seq: int = 0

    def __post_init__(self):
        _require_int(self.request_id, "request_id")
        _require_int(self.seq, "seq")

    kind = "ACT_ACK"

    def _body(self) -> list[tuple[str, object]]:
        return [("request_id", self.request_id)]


@dataclass(frozen=True)
class Verdict:
    context_key: str
    text: str
    severity: str
    seq: int = 0

    def __post_init__(self):
        _require_str(self.context_key, "context_key")
        _require_str(self.text, "text")
        if self.severity not in _SEVERITIES:
            raise ValueError(f"severity must be one of {_SEVERITIES}")
        _require_int(self.seq, "seq")

    kind = "VERDICT"

    def _body(self) -> list[tuple[str, object]]:
        return [("context_key", self.context_key),
                ("severity", self.severity),
                ("text", self.text)]


@dataclass(frozen=True)
class Bye:
    seq: int = 0

    def __post_init__(self):
        _require_int(self.seq, "seq")

    kind = "BYE"

    def _body(self) -> list[tuple[str, object]]:
        return []


WireMessage = Union[Hello, Event, CondReq, CondResp, ActReq, ActAck, Verdict, Bye]

_CLASSES: dict[str, type] = {
    cls.kind: cls for cls in (Hello, Event, CondReq, CondResp, ActReq, ActAck, Verdict, Bye)
}


def encode(msg: WireMessage) -> bytes:
    """Frame one message canonically.

    Raises EncodeError if the payload would exceed the 1 MiB frame limit
    or contains strings UTF-8 cannot carry.
    """
    obj = dict([("kind", msg.kind), ("seq", msg.seq)] + msg._body())
    try:
        payload = json.dumps(obj, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    except (UnicodeEncodeError, ValueError) as exc:
        raise EncodeError(f"payload not encodable: {exc}") from exc
    if len(payload) > MAX_FRAME_BYTES:
        raise EncodeError(f"payload of {len(payload)} bytes exceeds {MAX_FRAME_BYTES}")
    return struct.pack(">I", len(payload)) + payload


def _reject_duplicate_keys(pairs: list[tuple[str, object]]) -> dict:
    obj = dict(pairs)
    if len(obj) != len(pairs):
        raise ValueError("duplicate object keys")
    return obj


def _message_from_obj(obj: object) -> WireMessage:
    if not isinstance(obj, dict):
        raise DecodeError("payload is not a JSON object")
    kind = obj.get("kind")
    cls = _CLASSES.get(kind) if isinstance(kind, str) else None
    if cls is None:
        raise DecodeError(f"unknown message kind {kind!r}")
    fields = dict(obj)
    del fields["kind"]
    if "seq" not in fields:
        raise DecodeError("missing field 'seq'")
    expected = {name for name, _ in cls.__dataclass_fields__.items()}
    extra = set(fields) - expected
    if extra:
        raise DecodeError(f"unexpected field(s) {sorted(extra)} in {kind}")
    missing = expected - set(fields)
    if missing:
        raise DecodeError(f"missing field(s) {sorted(missing)} in {kind}")
    try:
        return cls(**fields)
    except (ValueError, TypeError) as exc:
        raise DecodeError(f"invalid {kind}: {exc}") from exc


def decode(buffer: bytes) -> tuple[WireMessage | None, bytes]:
    """Decode the first frame in `buffer`.

    Returns (message, remainder), or (None, buffer) when the buffer holds
    only a prefix of a frame (needs more data). Raises DecodeError on a
    malformed frame; the connection that produced it must be closed.
    """
    if len(buffer) < 4:
        return None, buffer
    (length,) = struct.unpack(">I", buffer[:4])
    if length > MAX_FRAME_BYTES:
        raise DecodeError(f"declared frame length {length} exceeds {MAX_FRAME_BYTES}")
    if len(buffer) < 4 + length:
        return None, buffer
    payload = buffer[4:4 + length]
    rest = buffer[4 + length:]
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"payload is not UTF-8: {exc}") from exc
    try:
        obj = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except ValueError as exc:
        raise DecodeError(f"payload is not JSON: {exc}") from exc
    return _message_from_obj(obj), rest


class FrameDecoder:
    """Incremental decoder for a socket's inbound byte stream."""

    def __init__(self):
        self._buffer = b""

    def feed(self, data: bytes) -> list[WireMessage]:
        """Buffer `data` and return every complete message it finishes."""
        self._buffer += data
        messages: list[WireMessage] = []
        while True:
            msg, rest = decode(self._buffer)
            if msg is None:
                return messages
            self._buffer = rest
            messages.append(msg)

    @property
    def pending_bytes(self) -> int:
        return len(self._buffer)
