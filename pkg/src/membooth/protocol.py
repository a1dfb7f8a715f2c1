"""Wire protocol: length-delimited JSON frames over a persistent connection.

Frame layout: ASCII byte length, newline, then exactly that many bytes of
JSON (which itself ends in a newline). Messages carry a kind, a per-session
monotone seq, and a kind-specific payload object. See PROTOCOL.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from membooth.errors import ProtocolError

KINDS = frozenset({
    "session_start",
    "transcript_partial",
    "transcript_stable",
    "transcript_retract",
    "memory_add",
    "memory_remove",
    "memory_state",
    "metrics_update",
    "session_end",
    "error",
})

MAX_FRAME_BYTES = 8 * 1024 * 1024


@dataclass(frozen=True)
class ProtocolMessage:
    kind: str
    seq: int
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProtocolError(f"unknown message kind {self.kind!r}")
        if not isinstance(self.seq, int) or self.seq < 0:
            raise ProtocolError(f"seq must be a non-negative int, got {self.seq!r}")
        if not isinstance(self.payload, dict):
            raise ProtocolError("payload must be an object")


def encode_message(msg: ProtocolMessage) -> bytes:
    body = json.dumps(
        {"kind": msg.kind, "seq": msg.seq, "payload": msg.payload},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8") + b"\n"
    return str(len(body)).encode("ascii") + b"\n" + body


def decode_body(body: bytes) -> ProtocolMessage:
    try:
        obj = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"bad frame body: {exc}") from None
    if not isinstance(obj, dict) or set(obj) != {"kind", "seq", "payload"}:
        raise ProtocolError("frame must be an object with kind, seq, payload")
    return ProtocolMessage(kind=obj["kind"], seq=obj["seq"], payload=obj["payload"])


class FrameDecoder:
    """Incremental decoder: feed bytes, collect complete messages."""

    def __init__(self):
        self._buf = bytearray()
        self._want: Optional[int] = None

    def feed(self, data: bytes) -> list[ProtocolMessage]:
        self._buf.extend(data)
        out: list[ProtocolMessage] = []
        while True:
            if self._want is None:
                nl = self._buf.find(b"\n")
                if nl < 0:
                    if len(self._buf) > 20:
                        raise ProtocolError("frame header too long")
                    return out
                header = bytes(self._buf[:nl])
                del self._buf[: nl + 1]
                try:
                    want = int(header)
                except ValueError:
                    raise ProtocolError(f"bad frame length {header!r}") from None
                if not (0 < want <= MAX_FRAME_BYTES):
                    raise ProtocolError(f"frame length {want} out of range")
                self._want = want
            if len(self._buf) < self._want:
                return out
            body = bytes(self._buf[: self._want])
            del self._buf[: self._want]
            self._want = None
            out.append(decode_body(body))

    @property
    def pending_bytes(self) -> int:
        return len(self._buf)


def decode_message(data: bytes) -> ProtocolMessage:
    """Decode exactly one frame; extra or missing bytes are an error."""
    dec = FrameDecoder()
    msgs = dec.feed(data)
    if len(msgs) != 1 or dec.pending_bytes:
        raise ProtocolError("expected exactly one complete frame")
    return msgs[0]


async def read_frame(reader) -> Optional[ProtocolMessage]:
    """Read one frame from an asyncio stream; None on clean EOF."""
    try:
        header = await reader.readuntil(b"\n")
    except Exception as exc:  # IncompleteReadError at EOF, LimitOverrun
        import asyncio

        if isinstance(exc, asyncio.IncompleteReadError) and not exc.partial:
            return None
        raise ProtocolError(f"bad frame header: {exc}") from None
    try:
        want = int(header.strip())
    except ValueError:
        raise ProtocolError(f"bad frame length {header!r}") from None
    if not (0 < want <= MAX_FRAME_BYTES):
        raise ProtocolError(f"frame length {want} out of range")
    try:
        body = await reader.readexactly(want)
    except Exception as exc:
        raise ProtocolError(f"truncated frame: {exc}") from None
    return decode_body(body)


async def write_frame(writer, msg: ProtocolMessage) -> None:
    writer.write(encode_message(msg))
    await writer.drain()
