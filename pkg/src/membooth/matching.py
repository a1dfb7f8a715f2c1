"""Memory matcher: scans the top hypothesis against a memory snapshot.

Windows of 1..4 consecutive tokens are scored against every non-extended
entry by normalized edit similarity; aliases hit only on exact window
equality. Extended entries never rewrite anything, they only veto
overlapping candidates, which is how operators damp false positives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from membooth._kernels import levenshtein, levenshtein_bounded
from membooth.errors import InvalidThreshold, OverlappingMatches
from membooth.memory import MAX_PHRASE_WORDS, MemoryEntry, MemorySnapshot
from membooth.recognizer import BeamToken, split_confusion_span
from membooth.textnorm import normalize_token

DEFAULT_THETA = 0.75


def similarity(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    longest = max(len(a), len(b))
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class MemoryMatch:
    entry_normalized: str
    start: int  # token index into the top beam, half-open span
    end: int
    score: float
    via_alias: bool
    suppressed_by_extended: bool = False
    window_text: str = ""

    def to_dict(self) -> dict:
        return {
            "entry": self.entry_normalized,
            "span": [self.start, self.end],
            "score": round(self.score, 6),
            "via_alias": self.via_alias,
            "suppressed_by_extended": self.suppressed_by_extended,
            "window": self.window_text,
        }


@dataclass(frozen=True)
class Provenance:
    kind: str  # "plain" | "memory_hit"
    entry_normalized: str = ""
    via_alias: bool = False

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "memory_hit":
            d["entry"] = self.entry_normalized
            d["via_alias"] = self.via_alias
        return d


PLAIN = Provenance(kind="plain")


@dataclass(frozen=True)
class DecodedToken:
    text: str
    start_ms: int
    end_ms: int
    provenance: Provenance = PLAIN

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
            "provenance": self.provenance.to_dict(),
        }


def _check_theta(theta: float) -> None:
    if not 0.0 < theta <= 1.0:
        raise InvalidThreshold(f"theta must be in (0, 1], got {theta}")


class Matcher:
    """Snapshot-indexed matcher with window-level score caching.

    Rebuilds its index whenever the snapshot version moves; safe to keep one
    per session. All lookups are pure with respect to the snapshot, so a
    shared instance may serve concurrent readers of the same version.
    """

    _CACHE_CAP = 1 << 20

    def __init__(self, theta: float = DEFAULT_THETA):
        _check_theta(theta)
        self.theta = theta
        self._version: Optional[int] = None
        self._exact: dict[str, MemoryEntry] = {}
        self._alias: dict[str, MemoryEntry] = {}
        self._buckets: dict[int, list[MemoryEntry]] = {}
        self._ext_exact: dict[str, MemoryEntry] = {}
        self._ext_alias: dict[str, MemoryEntry] = {}
        self._ext_buckets: dict[int, list[MemoryEntry]] = {}
        self._cache: dict[str, Optional[tuple[float, MemoryEntry, bool]]] = {}
        self._ext_cache: dict[str, float] = {}

    def _index(self, snapshot: MemorySnapshot) -> None:
        if snapshot.version == self._version:
            return
        self._version = snapshot.version
        self._exact, self._alias, self._buckets = {}, {}, {}
        self._ext_exact, self._ext_alias, self._ext_buckets = {}, {}, {}
        self._cache.clear()
        self._ext_cache.clear()
        for e in snapshot.entries:
            exact = self._ext_exact if e.extended else self._exact
            alias = self._ext_alias if e.extended else self._alias
            buckets = self._ext_buckets if e.extended else self._buckets
            exact.setdefault(e.normalized, e)
            for a in e.aliases:
                alias.setdefault(a, e)
            buckets.setdefault(len(e.normalized), []).append(e)

    def _fuzzy_best(
        self, window: str, buckets: dict[int, list[MemoryEntry]], floor: float
    ) -> tuple[float, Optional[MemoryEntry]]:
        n = len(window)
        best_score, best_entry = 0.0, None
        for length, entries in buckets.items():
            longest = max(n, length)
            budget = int((1.0 - floor) * longest + 1e-9)
            if abs(length - n) > budget:
                continue
            for e in entries:
                d = levenshtein_bounded(window, e.normalized, budget)
                if d > budget:
                    continue
                score = 1.0 - d / longest
                if score > best_score or (
                    score == best_score
                    and best_entry is not None
                    and (e.added_at, e.normalized) < (best_entry.added_at, best_entry.normalized)
                ):
                    best_score, best_entry = score, e
        return best_score, best_entry

    def _best_candidate(self, window: str) -> Optional[tuple[float, MemoryEntry, bool]]:
        """Best non-extended (score, entry, via_alias) for a window, or None."""
        if window in self._cache:
            return self._cache[window]
        hit: Optional[tuple[float, MemoryEntry, bool]] = None
        if window in self._exact:
            hit = (1.0, self._exact[window], False)
        elif window in self._alias:
            hit = (1.0, self._alias[window], True)
        else:
            score, entry = self._fuzzy_best(window, self._buckets, self.theta)
            if entry is not None and score >= self.theta:
                hit = (score, entry, False)
        if len(self._cache) >= self._CACHE_CAP:
            self._cache.clear()
        self._cache[window] = hit
        return hit

    def _best_extended(self, window: str) -> float:
        """Best extended-entry score for a window (0.0 when none reaches θ)."""
        if not self._ext_buckets and not self._ext_alias:
            return 0.0
        if window in self._ext_cache:
            return self._ext_cache[window]
        if window in self._ext_exact or window in self._ext_alias:
            score = 1.0
        else:
            score, entry = self._fuzzy_best(window, self._ext_buckets, self.theta)
            if entry is None:
                score = 0.0
        if len(self._ext_cache) >= self._CACHE_CAP:
            self._ext_cache.clear()
        self._ext_cache[window] = score
        return score

    def match(self, tokens: Sequence[BeamToken], snapshot: MemorySnapshot) -> list[MemoryMatch]:
        self._index(snapshot)
        words = [normalize_token(t.text) for t in tokens]
        candidates: list[MemoryMatch] = []
        for i in range(len(words)):
            for j in range(i + 1, min(i + MAX_PHRASE_WORDS, len(words)) + 1):
                window = " ".join(words[i:j])
                hit = self._best_candidate(window)
                if hit is None:
                    continue
                score, entry, via_alias = hit
                candidates.append(
                    MemoryMatch(
                        entry_normalized=entry.normalized,
                        start=i,
                        end=j,
                        score=score,
                        via_alias=via_alias,
                        window_text=window,
                    )
                )
        resolved = _resolve(candidates)
        return [self._mark_suppressed(m, words) for m in resolved]

    def _mark_suppressed(self, match: MemoryMatch, words: list[str]) -> MemoryMatch:
        # any extended entry matching an overlapping window at >= score vetoes
        if not self._ext_buckets and not self._ext_alias:
            return match
        lo = max(0, match.start - MAX_PHRASE_WORDS + 1)
        for i in range(lo, match.end):
            for j in range(max(i + 1, match.start + 1), min(i + MAX_PHRASE_WORDS, len(words)) + 1):
                if self._best_extended(" ".join(words[i:j])) >= match.score:
                    return MemoryMatch(
                        entry_normalized=match.entry_normalized,
                        start=match.start,
                        end=match.end,
                        score=match.score,
                        via_alias=match.via_alias,
                        suppressed_by_extended=True,
                        window_text=match.window_text,
                    )
        return match


def _resolve(candidates: list[MemoryMatch]) -> list[MemoryMatch]:
    """Greedy non-overlap resolution: score desc, longer span, earlier start."""
    ranked = sorted(
        candidates,
        key=lambda m: (-m.score, -(m.end - m.start), m.start, m.entry_normalized),
    )
    taken: list[MemoryMatch] = []
    for m in ranked:
        if all(m.end <= t.start or m.start >= t.end for t in taken):
            taken.append(m)
    taken.sort(key=lambda m: m.start)
    return taken


def match_memory(
    tokens: Sequence[BeamToken], snapshot: MemorySnapshot, theta: float = DEFAULT_THETA
) -> list[MemoryMatch]:
    """One-shot window scan; use a Matcher instance for repeated decodes."""
    return Matcher(theta=theta).match(tokens, snapshot)


def apply_matches(
    tokens: Sequence[BeamToken], matches: Iterable[MemoryMatch], snapshot: MemorySnapshot
) -> list[DecodedToken]:
    """Rewrite matched spans to their entries, tagging provenance per token."""
    ordered = sorted(matches, key=lambda m: m.start)
    prev_end = 0
    for m in ordered:
        if m.start < prev_end:
            raise OverlappingMatches(f"match at {m.start} overlaps previous span")
        if not 0 <= m.start < m.end <= len(tokens):
            raise OverlappingMatches(f"span [{m.start}, {m.end}) outside beam")
        prev_end = m.end
    out: list[DecodedToken] = []
    cursor = 0
    for m in ordered:
        for t in tokens[cursor : m.start]:
            out.append(DecodedToken(text=t.text, start_ms=t.start_ms, end_ms=t.end_ms))
        span = tokens[m.start : m.end]
        if m.suppressed_by_extended:
            for t in span:
                out.append(DecodedToken(text=t.text, start_ms=t.start_ms, end_ms=t.end_ms))
        else:
            entry = snapshot.get(m.entry_normalized)
            surface_words = (entry.normalized if entry else m.entry_normalized).split()
            spans = split_confusion_span(surface_words, span[0].start_ms, span[-1].end_ms)
            tag = Provenance(
                kind="memory_hit", entry_normalized=m.entry_normalized, via_alias=m.via_alias
            )
            for w, (s, e) in zip(surface_words, spans):
                out.append(DecodedToken(text=w, start_ms=s, end_ms=e, provenance=tag))
        cursor = m.end
    for t in tokens[cursor:]:
        out.append(DecodedToken(text=t.text, start_ms=t.start_ms, end_ms=t.end_ms))
    return out


@dataclass(frozen=True)
class DecodeRecord:
    """One line of the decode log; everything the console needs per chunk."""

    chunk_id: int
    theta: float
    matches: tuple[MemoryMatch, ...]
    n_tokens: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "chunk_id": self.chunk_id,
                "theta": self.theta,
                "n_tokens": self.n_tokens,
                "matches": [m.to_dict() for m in self.matches if not m.suppressed_by_extended],
                "suppressions": [m.to_dict() for m in self.matches if m.suppressed_by_extended],
            },
            sort_keys=True,
        )


def decode_chunk(
    tokens: Sequence[BeamToken],
    snapshot: MemorySnapshot,
    matcher: Matcher,
    chunk_id: int = 0,
) -> tuple[list[DecodedToken], DecodeRecord]:
    matches = matcher.match(tokens, snapshot)
    decoded = apply_matches(tokens, matches, snapshot)
    record = DecodeRecord(
        chunk_id=chunk_id,
        theta=matcher.theta,
        matches=tuple(matches),
        n_tokens=len(tokens),
    )
    return decoded, record
