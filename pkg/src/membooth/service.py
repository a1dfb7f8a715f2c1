"""Live session service: one streaming session per TCP connection.

The client opens with session_start naming a corpus script and options; the
server paces the simulated session (realtime by default), streaming partial,
stable, and retract frames. Client memory_add / memory_remove frames are
serialized into the session's event queue exactly like the operator agent's
mutations, and each applied mutation is acknowledged with memory_state.
"""

from __future__ import annotations

import asyncio
import itertools
from pathlib import Path
from typing import Optional

from membooth.corpus import Corpus
from membooth.errors import ConfigError, MemboothError, ProtocolError
from membooth.matching import DEFAULT_THETA
from membooth.protocol import ProtocolMessage, read_frame, write_frame
from membooth.scenario import ScenarioConfig, build_initial_memory, evaluate_session
from membooth.stream import (
    ChunkPolicy,
    JitterSpec,
    MemoryMutation,
    StreamSession,
    parse_mode,
)

KNOWN_OPTIONS = {
    "script", "seed", "theta", "min_chunk_ms", "mode", "jitter",
    "approach", "schedule", "realtime", "time_scale",
}


def _parse_jitter(spec) -> JitterSpec:
    if spec is None:
        return JitterSpec()
    if spec == "none":
        return JitterSpec(kind="none")
    if isinstance(spec, dict):
        allowed = {"kind", "low_ms", "high_ms", "packet_ms"}
        bad = set(spec) - allowed
        if bad:
            raise ConfigError(f"unknown jitter fields {sorted(bad)}")
        return JitterSpec(**spec)
    raise ConfigError(f"bad jitter spec {spec!r}")


def _parse_schedule(raw) -> list[MemoryMutation]:
    if raw is None:
        return []
    if not isinstance(raw, list):
        raise ConfigError("schedule must be a list of mutation objects")
    out = []
    for item in raw:
        if not isinstance(item, dict):
            raise ConfigError("schedule entries must be objects")
        try:
            out.append(
                MemoryMutation(
                    at_ms=int(item["at_ms"]),
                    action=item.get("action", "add"),
                    surface=item["surface"],
                    aliases=tuple(item.get("aliases", ())),
                    extended=bool(item.get("extended", False)),
                    origin=item.get("origin", "replay"),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"schedule entry missing {exc}") from None
    return out


class _SessionRunner:
    """Drives one session for one connection."""

    def __init__(self, corpus: Corpus, options: dict):
        bad = set(options) - KNOWN_OPTIONS
        if bad:
            raise ConfigError(f"unknown session options {sorted(bad)}")
        if "script" not in options:
            raise ConfigError("session_start needs a script name")
        self.item = corpus.get(options["script"])
        self.seed = int(options.get("seed", 0))
        self.theta = float(options.get("theta", DEFAULT_THETA))
        self.mode = parse_mode(options.get("mode", "ship"))
        self.realtime = bool(options.get("realtime", True))
        self.time_scale = float(options.get("time_scale", 1.0))
        if self.time_scale <= 0:
            raise ConfigError("time_scale must be > 0")
        policy = ChunkPolicy(
            min_chunk_ms=int(options.get("min_chunk_ms", 1000)),
            jitter=_parse_jitter(options.get("jitter")),
        )
        schedule = _parse_schedule(options.get("schedule"))
        approach = options.get("approach")
        if approach:
            cfg = ScenarioConfig(
                approach=approach, scripts=(self.item.name,), seeds=(self.seed,),
                theta=self.theta, min_chunk_ms=policy.min_chunk_ms,
                jitter=policy.jitter, mode=options.get("mode", "ship"),
            )
            schedule = build_initial_memory(cfg, self.item, seed=self.seed) + schedule
        from membooth.memory import MemoryStore

        self.session = StreamSession(
            script=self.item.script,
            policy=policy,
            store=MemoryStore(),
            theta=self.theta,
            mode=self.mode,
            schedule=schedule,
            seed=self.seed,
        )

    def describe(self) -> dict:
        return {
            "script": self.item.name,
            "seed": self.seed,
            "theta": self.theta,
            "mode": self.mode.kind,
            "realtime": self.realtime,
            "script_end_ms": self.session.script.end_ms,
            "n_script_tokens": len(self.session.script.tokens),
        }


class SessionService:
    def __init__(self, corpus_root: str | Path, host: str = "127.0.0.1", port: int = 0):
        self.corpus_root = str(corpus_root)
        self.host = host
        self.port = port
        self._server: Optional[asyncio.base_events.Server] = None

    async def start(self) -> tuple[str, int]:
        Corpus.load(self.corpus_root)  # fail fast on a bad root
        self._server = await asyncio.start_server(self._handle, self.host, self.port)
        sock = self._server.sockets[0].getsockname()
        self.host, self.port = sock[0], sock[1]
        return self.host, self.port

    async def serve_forever(self) -> None:
        if self._server is None:
            await self.start()
        async with self._server:
            await self._server.serve_forever()

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        seq = itertools.count()

        async def send(kind: str, payload: dict) -> None:
            await write_frame(writer, ProtocolMessage(kind=kind, seq=next(seq), payload=payload))

        try:
            try:
                first = await read_frame(reader)
            except ProtocolError as exc:
                await send("error", {"message": str(exc)})
                return
            if first is None:
                return
            if first.kind != "session_start":
                await send("error", {"message": f"expected session_start, got {first.kind}"})
                return
            try:
                corpus = Corpus.load(self.corpus_root)
                runner = _SessionRunner(corpus, first.payload)
            except (MemboothError, ValueError, KeyError, TypeError) as exc:
                await send("error", {"message": f"cannot start session: {exc}"})
                return

            await send("session_start", runner.describe())
            await self._drive(runner, reader, send)
        except (ConnectionResetError, BrokenPipeError, ProtocolError):
            pass
        finally:
            try:
                writer.close()
                await writer.wait_closed()
            except Exception:
                pass

    async def _drive(self, runner: _SessionRunner, reader, send) -> None:
        session = runner.session
        inbox: asyncio.Queue = asyncio.Queue()
        closed = asyncio.Event()

        async def pump_client():
            while True:
                try:
                    msg = await read_frame(reader)
                except ProtocolError as exc:
                    await inbox.put(("bad", str(exc)))
                    return
                if msg is None:
                    closed.set()
                    return
                await inbox.put(("msg", msg))

        pump = asyncio.create_task(pump_client())
        loop = asyncio.get_running_loop()
        t0 = loop.time()
        session_failed: Optional[str] = None

        def apply_client(msg: ProtocolMessage) -> None:
            if msg.kind == "memory_add":
                session.inject(MemoryMutation(
                    at_ms=session.now, action="add",
                    surface=str(msg.payload["surface"]),
                    aliases=tuple(msg.payload.get("aliases", ())),
                    extended=bool(msg.payload.get("extended", False)),
                    origin="client",
                ))
            elif msg.kind == "memory_remove":
                session.inject(MemoryMutation(
                    at_ms=session.now, action="remove",
                    surface=str(msg.payload["surface"]), origin="client",
                ))
            else:
                raise ProtocolError(f"unexpected {msg.kind} during session")

        try:
            await send("memory_state", {
                "version": session.store.version,
                "entries": [e.to_dict() for e in session.store.snapshot().entries],
                "trigger": None,
            })
            for ev in session.events():
                if runner.realtime:
                    target = t0 + (ev.at_ms / 1000.0) / runner.time_scale
                    delay = target - loop.time()
                    if delay > 0:
                        await asyncio.sleep(delay)
                else:
                    await asyncio.sleep(0)
                while not inbox.empty():
                    tag, msg = inbox.get_nowait()
                    if tag == "bad":
                        raise ProtocolError(msg)
                    apply_client(msg)
                await self._forward(session, ev, send)
        except ProtocolError as exc:
            await send("error", {"message": str(exc)})
            return
        except (MemboothError, KeyError, TypeError, ValueError) as exc:
            session_failed = f"{type(exc).__name__}: {exc}"
        finally:
            pump.cancel()

        if session_failed is not None:
            await send("error", {"message": f"session failed: {session_failed}"})
            return

        try:
            rate, dist, n_ref, report = evaluate_session(runner.item, session)
            await send("metrics_update", {
                "final": True, "wer": rate, "mwer_distance": dist,
                "ref_words": n_ref, **report.metrics(),
            })
        except MemboothError:
            pass  # scripts without references still stream fine
        segments = session.final_segments()
        await send("session_end", {
            "reason": "complete",
            "transcript": session.transcript_display(),
            "n_segments": len(segments),
            "n_retractions": sum(1 for s in session.segments if s.status == "retracted"),
        })

    async def _forward(self, session: StreamSession, ev, send) -> None:
        if ev.kind == "segment":
            await send("transcript_stable", {"at_ms": ev.at_ms, "segment": ev.payload.to_dict()})
        elif ev.kind == "retract":
            await send("transcript_retract", {"at_ms": ev.at_ms, **ev.payload})
        elif ev.kind == "partial":
            p = ev.payload
            await send("transcript_partial", {
                "at_ms": ev.at_ms,
                "chunk_id": p["chunk_id"],
                "from_ms": p["from_ms"],
                "to_ms": p["to_ms"],
                "tokens": [t.to_dict() for t in p["tokens"]],
            })
        elif ev.kind == "memory":
            snap = session.store.snapshot()
            await send("memory_state", {
                "version": snap.version,
                "entries": [e.to_dict() for e in snap.entries],
                "trigger": ev.payload["mutation"],
            })
        # decode events stay server-internal


def serve(bind: str, corpus_root: str | Path) -> None:
    """Blocking entry point: serve until interrupted."""
    host, _, port_s = bind.rpartition(":")
    if not host or not port_s.isdigit():
        raise ConfigError(f"bad bind address {bind!r}; expected host:port")
    service = SessionService(corpus_root, host=host, port=int(port_s))

    async def _run():
        h, p = await service.start()
        print(f"membooth service listening on {h}:{p}")
        await service.serve_forever()

    try:
        asyncio.run(_run())
    except KeyboardInterrupt:
        pass
