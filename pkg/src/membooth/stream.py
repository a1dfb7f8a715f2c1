"""Streaming worker: jittered audio accumulation, chunk decoding, stability
detection, emission, and delayed-window retraction.

Simulated time drives everything. The only randomness a seed controls is
packet arrival jitter; beam divergence is seeded from chunk content, so a
zero-jitter session is bit-identical across seeds.
"""

from __future__ import annotations

import heapq
import json
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from membooth.casing import CasedToken, apply_casing, punctuate, render_text
from membooth.errors import ConfigError
from membooth.matching import DecodedToken, DecodeRecord, Matcher, MemoryMatch, apply_matches
from membooth.memory import MemoryStore
from membooth.recognizer import HypothesisBeam, Script, chunk_seed, recognize_chunk

GAP_PERIOD_MS = 700


@dataclass(frozen=True)
class JitterSpec:
    kind: str = "uniform"  # uniform | none
    low_ms: int = 0
    high_ms: int = 150
    packet_ms: int = 100

    def __post_init__(self):
        if self.kind not in ("uniform", "none"):
            raise ConfigError(f"unknown jitter kind {self.kind!r}")
        if self.low_ms < 0 or self.high_ms < self.low_ms:
            raise ConfigError("jitter delays must satisfy 0 <= low <= high")
        if self.packet_ms <= 0:
            raise ConfigError("packet_ms must be > 0")

    def delays(self, n: int, seed: int) -> list[int]:
        if self.kind == "none" or self.high_ms == 0:
            return [0] * n
        rng = random.Random(seed)
        return [rng.randint(self.low_ms, self.high_ms) for _ in range(n)]


@dataclass(frozen=True)
class ChunkPolicy:
    min_chunk_ms: int = 1000
    jitter: JitterSpec = field(default_factory=JitterSpec)
    n_best: int = 4
    k_max: int = 3
    force_after: int = 3  # consecutive stalled chunks before force-emit

    def __post_init__(self):
        if self.min_chunk_ms <= 0:
            raise ConfigError("min_chunk_ms must be > 0")
        if self.n_best < 1:
            raise ConfigError("n_best must be >= 1")
        if self.force_after < 1:
            raise ConfigError("force_after must be >= 1")


@dataclass(frozen=True)
class EmissionMode:
    kind: str = "ship_immediately"  # ship_immediately | delayed_window
    window_ms: int = 0

    def __post_init__(self):
        if self.kind not in ("ship_immediately", "delayed_window"):
            raise ConfigError(f"unknown emission mode {self.kind!r}")
        if self.kind == "delayed_window" and self.window_ms < 0:
            raise ConfigError("delay window must be >= 0")


def parse_mode(text: str) -> EmissionMode:
    """``ship`` or ``delay:<R ms>``."""
    if text == "ship":
        return EmissionMode(kind="ship_immediately")
    if text.startswith("delay:"):
        return EmissionMode(kind="delayed_window", window_ms=int(text.split(":", 1)[1]))
    raise ConfigError(f"bad mode {text!r}; expected 'ship' or 'delay:<ms>'")


@dataclass(frozen=True)
class MemoryMutation:
    at_ms: int
    action: str  # add | remove
    surface: str
    aliases: tuple[str, ...] = ()
    extended: bool = False
    origin: str = "schedule"

    def to_dict(self) -> dict:
        return {
            "at_ms": self.at_ms,
            "action": self.action,
            "surface": self.surface,
            "aliases": list(self.aliases),
            "extended": self.extended,
            "origin": self.origin,
        }


@dataclass
class EmittedSegment:
    segment_id: int
    tokens: list[DecodedToken]
    status: str  # stable | retracted ("superseded" reserved)
    wall_emit_ms: int
    script_start_ms: int
    script_end_ms: int
    snapshot_version: int
    chunk_id: int
    retractable_until_ms: Optional[int] = None
    supersedes: Optional[int] = None
    sentence_break_before: bool = False
    sentence_initial: bool = False
    cased: list[CasedToken] = field(default_factory=list)

    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)

    def to_dict(self) -> dict:
        d = {
            "segment_id": self.segment_id,
            "status": self.status,
            "wall_emit_ms": self.wall_emit_ms,
            "script_start_ms": self.script_start_ms,
            "script_end_ms": self.script_end_ms,
            "snapshot_version": self.snapshot_version,
            "chunk_id": self.chunk_id,
            "sentence_break_before": self.sentence_break_before,
            "tokens": [t.to_dict() for t in self.tokens],
            "cased": [t.to_dict() for t in self.cased],
        }
        if self.retractable_until_ms is not None:
            d["retractable_until_ms"] = self.retractable_until_ms
        if self.supersedes is not None:
            d["supersedes"] = self.supersedes
        return d


@dataclass(frozen=True)
class SessionEvent:
    at_ms: int
    kind: str  # segment | retract | partial | memory | decode
    payload: object


def detect_stable(beam: HypothesisBeam) -> tuple[list, list]:
    """Longest common token prefix of all beams; remainder of the top beam."""
    top = list(beam.top)
    n = len(top)
    for other in beam.beams[1:]:
        texts = [t.text for t in other]
        i = 0
        while i < n and i < len(texts) and texts[i] == top[i].text:
            i += 1
        n = min(n, i)
    return top[:n], top[n:]


class StreamSession:
    """One talk played through the online loop in simulated time.

    ``events()`` yields ordered SessionEvents; ``inject()`` may be called
    between yields to add memory mutations at the current session time
    (operator agent, live console client).
    """

    def __init__(
        self,
        script: Script,
        policy: ChunkPolicy,
        store: MemoryStore,
        theta: float,
        mode: EmissionMode,
        schedule: Optional[list[MemoryMutation]] = None,
        seed: int = 0,
        uppercase_lexicon: frozenset = frozenset(),
    ):
        self.script = script
        self.policy = policy
        self.store = store
        self.mode = mode
        self.seed = seed
        self.matcher = Matcher(theta=theta)
        self.uppercase_lexicon = uppercase_lexicon
        self.segments: list[EmittedSegment] = []
        self.decode_log: list[dict] = []
        self._events: list[SessionEvent] = []
        self._heap: list = []
        self._push_seq = 0
        self._now = 0
        self._frontier = 0
        self._decoded_until = 0
        self._emitted_until = 0
        self._chunk_id = 0
        self._segment_id = 0
        self._stall = 0
        self._prev_emit_end: Optional[int] = None
        self._pending: list[EmittedSegment] = []
        self._finished = False
        for mut in schedule or []:
            self._push(mut.at_ms, 0, ("mutation", mut))
        self._schedule_packets()

    # -- plumbing ----------------------------------------------------------

    def _push(self, at_ms: int, prio: int, item) -> None:
        heapq.heappush(self._heap, (at_ms, prio, self._push_seq, item))
        self._push_seq += 1

    def _schedule_packets(self) -> None:
        end = self.script.end_ms
        p = self.policy.jitter.packet_ms
        n_packets = (end + p - 1) // p
        delays = self.policy.jitter.delays(n_packets, self.seed)
        ready = 0
        last_ready = 0
        for i in range(n_packets):
            sent = min((i + 1) * p, end)
            ready = max(ready, sent + delays[i])
            audio_end = min((i + 1) * p, end)
            self._push(ready, 1, ("packet", audio_end))
            last_ready = ready
        self._push(last_ready, 2, ("flush", None))

    def inject(self, mutation: MemoryMutation) -> None:
        at = max(mutation.at_ms, self._now)
        if at != mutation.at_ms:
            mutation = MemoryMutation(
                at_ms=at,
                action=mutation.action,
                surface=mutation.surface,
                aliases=mutation.aliases,
                extended=mutation.extended,
                origin=mutation.origin,
            )
        self._push(at, 0, ("mutation", mutation))

    @property
    def now(self) -> int:
        return self._now

    # -- main loop ---------------------------------------------------------

    def events(self) -> Iterator[SessionEvent]:
        while self._heap:
            at_ms, _prio, _seq, (kind, payload) = heapq.heappop(self._heap)
            self._now = at_ms
            if kind == "mutation":
                yield from self._apply_mutation(payload)
            elif kind == "packet":
                self._frontier = max(self._frontier, payload)
                if self._frontier - self._decoded_until >= self.policy.min_chunk_ms:
                    yield from self._decode(flush=False)
            elif kind == "flush":
                yield from self._decode(flush=True)
                self._finished = True

    def run(self) -> "StreamSession":
        for ev in self.events():
            self._events.append(ev)
        return self

    # -- mutations and re-decoding -----------------------------------------

    def _apply_mutation(self, mut: MemoryMutation) -> Iterator[SessionEvent]:
        before = self.store.version
        if mut.action == "add":
            entry = self.store.add_entry(
                mut.surface, aliases=mut.aliases, extended=mut.extended, added_at=self._now
            )
            payload = {"mutation": mut.to_dict(), "entry": entry.to_dict()}
        elif mut.action == "remove":
            removed = self.store.remove_entry(mut.surface)
            payload = {"mutation": mut.to_dict(), "removed": removed}
        else:
            raise ConfigError(f"unknown mutation action {mut.action!r}")
        payload["version"] = self.store.version
        yield SessionEvent(at_ms=self._now, kind="memory", payload=payload)
        if self.store.version != before and self.mode.kind == "delayed_window":
            yield from self._revisit_pending()

    def _revisit_pending(self) -> Iterator[SessionEvent]:
        snapshot = self.store.snapshot()
        still = []
        for seg in self._pending:
            if self._now >= (seg.retractable_until_ms or 0) or seg.status != "stable":
                continue
            slice_tokens = self.script.slice_within(seg.script_start_ms, seg.script_end_ms)
            top = recognize_chunk(slice_tokens, 1, 0).top
            matches = self.matcher.match(top, snapshot)
            decoded = apply_matches(top, matches, snapshot)
            if self._same_output(decoded, seg.tokens):
                still.append(seg)
                continue
            seg.status = "retracted"
            yield SessionEvent(
                at_ms=self._now, kind="retract", payload={"segment_id": seg.segment_id}
            )
            self._chunk_id += 1
            self._log_decode(
                chunk_id=self._chunk_id,
                window_start=seg.script_start_ms,
                window_end=seg.script_end_ms,
                snapshot_version=snapshot.version,
                matches=matches,
                n_tokens=len(top),
            )
            replacement = self._make_segment(
                decoded,
                script_start=seg.script_start_ms,
                script_end=seg.script_end_ms,
                snapshot_version=snapshot.version,
                retractable_until=seg.retractable_until_ms,
                supersedes=seg.segment_id,
                sentence_break_before=seg.sentence_break_before,
                sentence_initial=seg.sentence_initial,
            )
            still.append(replacement)
            yield SessionEvent(at_ms=self._now, kind="segment", payload=replacement)
        self._pending = still

    @staticmethod
    def _same_output(a: list[DecodedToken], b: list[DecodedToken]) -> bool:
        return [(t.text, t.provenance) for t in a] == [(t.text, t.provenance) for t in b]

    # -- decoding ----------------------------------------------------------

    def _log_decode(self, chunk_id, window_start, window_end, snapshot_version, matches, n_tokens):
        record = DecodeRecord(
            chunk_id=chunk_id,
            theta=self.matcher.theta,
            matches=tuple(matches),
            n_tokens=n_tokens,
        )
        meta = {
            "chunk_id": chunk_id,
            "window_start_ms": window_start,
            "window_end_ms": window_end,
            "snapshot_version": snapshot_version,
        }
        self.decode_log.append({**meta, "record": json.loads(record.to_json())})
        return SessionEvent(at_ms=self._now, kind="decode", payload={**meta, "record": record})

    def _make_segment(
        self,
        decoded: list[DecodedToken],
        script_start: int,
        script_end: int,
        snapshot_version: int,
        retractable_until: Optional[int],
        supersedes: Optional[int] = None,
        sentence_break_before: Optional[bool] = None,
        sentence_initial: Optional[bool] = None,
    ) -> EmittedSegment:
        if sentence_break_before is None:
            gap = (
                decoded[0].start_ms - self._prev_emit_end
                if decoded and self._prev_emit_end is not None
                else 0
            )
            sentence_break_before = gap >= GAP_PERIOD_MS
        if sentence_initial is None:
            sentence_initial = sentence_break_before or self._prev_emit_end is None
        directory = self.store.directory()
        cased = apply_casing(decoded, directory, sentence_initial, self.uppercase_lexicon)
        gaps = [
            max(0, decoded[i + 1].start_ms - decoded[i].end_ms)
            for i in range(len(decoded) - 1)
        ]
        cased = punctuate(cased, gaps, GAP_PERIOD_MS, end_of_session=False)
        seg = EmittedSegment(
            segment_id=self._segment_id,
            tokens=decoded,
            status="stable",
            wall_emit_ms=self._now,
            script_start_ms=script_start,
            script_end_ms=script_end,
            snapshot_version=snapshot_version,
            chunk_id=self._chunk_id,
            retractable_until_ms=retractable_until,
            supersedes=supersedes,
            sentence_break_before=sentence_break_before,
            sentence_initial=sentence_initial,
            cased=cased,
        )
        self._segment_id += 1
        self.segments.append(seg)
        return seg

    def _decode(self, flush: bool) -> Iterator[SessionEvent]:
        window_start = self._emitted_until
        window_end = self.script.end_ms if flush else self._frontier
        self._decoded_until = max(self._decoded_until, window_end)
        slice_tokens = self.script.slice_within(window_start, window_end)
        if not slice_tokens:
            self._emitted_until = window_end if flush else self._emitted_until
            return
        self._chunk_id += 1
        chunk_id = self._chunk_id
        snapshot = self.store.snapshot()
        beam = recognize_chunk(
            slice_tokens, self.policy.n_best, chunk_seed(slice_tokens), self.policy.k_max
        )
        matches = self.matcher.match(beam.top, snapshot)
        yield self._log_decode(
            chunk_id, window_start, window_end, snapshot.version, matches, len(beam.top)
        )

        # allowed cut points: beam-token boundaries that end a script token
        bounds = [0]
        bound_times = [window_start]
        for t in slice_tokens:
            bounds.append(bounds[-1] + len(t.confused_form.split()))
            bound_times.append(t.end_ms)

        if flush:
            cut = bounds[-1]
        else:
            stable, _tail = detect_stable(beam)
            cut = bounds[bisect_right(bounds, len(stable)) - 1]
            changed = True
            while changed:
                changed = False
                for m in matches:
                    if m.start < cut < m.end:
                        cut = bounds[bisect_right(bounds, m.start) - 1]
                        changed = True
            if cut == 0:
                self._stall += 1
                if self._stall >= self.policy.force_after:
                    cut = bounds[1]
                    self._stall = 0
            else:
                self._stall = 0

        if cut > 0:
            prefix_matches = [m for m in matches if m.end <= cut]
            decoded = apply_matches(beam.top[:cut], prefix_matches, snapshot)
            cut_time = bound_times[bounds.index(cut)]
            retractable = (
                self._now + self.mode.window_ms
                if self.mode.kind == "delayed_window" and not flush
                else None
            )
            seg = self._make_segment(
                decoded,
                script_start=window_start,
                script_end=cut_time,
                snapshot_version=snapshot.version,
                retractable_until=retractable,
            )
            self._prev_emit_end = decoded[-1].end_ms if decoded else self._prev_emit_end
            self._emitted_until = cut_time
            if retractable is not None:
                self._pending.append(seg)
            yield SessionEvent(at_ms=self._now, kind="segment", payload=seg)

        tail_tokens = beam.top[cut:]
        if tail_tokens and not flush:
            shifted = [
                MemoryMatch(
                    entry_normalized=m.entry_normalized,
                    start=m.start - cut,
                    end=m.end - cut,
                    score=m.score,
                    via_alias=m.via_alias,
                    suppressed_by_extended=m.suppressed_by_extended,
                    window_text=m.window_text,
                )
                for m in matches
                if m.start >= cut
            ]
            tail_decoded = apply_matches(tail_tokens, shifted, snapshot)
            yield SessionEvent(
                at_ms=self._now,
                kind="partial",
                payload={
                    "chunk_id": chunk_id,
                    "from_ms": self._emitted_until,
                    "to_ms": window_end,
                    "tokens": tail_decoded,
                },
            )

    # -- results -----------------------------------------------------------

    def final_segments(self) -> list[EmittedSegment]:
        live = [s for s in self.segments if s.status == "stable"]
        live.sort(key=lambda s: (s.script_start_ms, s.segment_id))
        return live

    def final_tokens(self) -> list[DecodedToken]:
        return [t for s in self.final_segments() for t in s.tokens]

    def final_cased(self) -> list[CasedToken]:
        out: list[CasedToken] = []
        for seg in self.final_segments():
            if seg.sentence_break_before and out and out[-1].trailing_punct == "none":
                out[-1] = CasedToken(
                    text=out[-1].text,
                    trailing_punct="period",
                    source=out[-1].source,
                    start_ms=out[-1].start_ms,
                    end_ms=out[-1].end_ms,
                )
            out.extend(seg.cased)
        if out and out[-1].trailing_punct == "none":
            out[-1] = CasedToken(
                text=out[-1].text,
                trailing_punct="period",
                source=out[-1].source,
                start_ms=out[-1].start_ms,
                end_ms=out[-1].end_ms,
            )
        return out

    def transcript_norm(self) -> str:
        return " ".join(t.text for t in self.final_tokens())

    def transcript_display(self) -> str:
        return render_text(self.final_cased())

    def segment_log_lines(self) -> list[str]:
        lines = []
        for ev in self._events:
            if ev.kind == "segment":
                lines.append(json.dumps(
                    {"at_ms": ev.at_ms, "event": "segment", **ev.payload.to_dict()},
                    sort_keys=True,
                ))
            elif ev.kind == "retract":
                lines.append(json.dumps(
                    {"at_ms": ev.at_ms, "event": "retract", **ev.payload}, sort_keys=True
                ))
        return lines

    @property
    def events_list(self) -> list[SessionEvent]:
        return self._events


def run_session(
    script: Script,
    policy: ChunkPolicy,
    store: MemoryStore,
    theta: float,
    mode: EmissionMode,
    schedule: Optional[list[MemoryMutation]] = None,
    seed: int = 0,
    uppercase_lexicon: frozenset = frozenset(),
    observer: Optional[Callable[["StreamSession", SessionEvent], None]] = None,
) -> StreamSession:
    """Run one session to completion; ``observer`` may inject() on events."""
    session = StreamSession(
        script, policy, store, theta, mode, schedule, seed, uppercase_lexicon
    )
    for ev in session.events():
        session._events.append(ev)
        if observer is not None:
            observer(session, ev)
    return session
