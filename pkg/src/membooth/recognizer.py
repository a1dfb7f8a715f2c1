"""Deterministic recognizer stand-in: plays back a confusion script as timed audio.

The baseline "acoustics" are authored per token: each script token carries the
normalized form the recognizer emits for it. N-best beams diverge only in a
short seeded tail, which is the property stability detection exploits.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass
from pathlib import Path

from membooth.textnorm import normalize_token


@dataclass(frozen=True)
class ScriptToken:
    """One ground-truth spoken word with timing and its confusion behavior."""

    ref_surface: str
    start_ms: int
    end_ms: int
    confused_form: str
    is_new_word: bool = False

    @property
    def ref_normalized(self) -> str:
        return normalize_token(self.ref_surface)


@dataclass(frozen=True)
class Script:
    """Time-ordered, non-overlapping token sequence; the unit of one talk."""

    tokens: tuple[ScriptToken, ...]
    name: str = ""

    def __post_init__(self):
        prev_end = -1
        for t in self.tokens:
            if t.start_ms >= t.end_ms:
                raise ValueError(f"token {t.ref_surface!r} has empty span")
            if t.start_ms < prev_end:
                raise ValueError(f"token {t.ref_surface!r} overlaps its predecessor")
            if not t.confused_form.strip():
                raise ValueError(f"token {t.ref_surface!r} lacks a confused form")
            prev_end = t.end_ms

    @property
    def end_ms(self) -> int:
        return self.tokens[-1].end_ms if self.tokens else 0

    def slice_within(self, start_ms: int, end_ms: int) -> list[ScriptToken]:
        """Tokens whose audio lies fully inside [start_ms, end_ms)."""
        return [t for t in self.tokens if t.start_ms >= start_ms and t.end_ms <= end_ms]


@dataclass(frozen=True)
class BeamToken:
    text: str
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class HypothesisBeam:
    """N ranked hypotheses over one decoded chunk; beams[0] is the top one."""

    beams: tuple[tuple[BeamToken, ...], ...]

    @property
    def n_best(self) -> int:
        return len(self.beams)

    @property
    def top(self) -> tuple[BeamToken, ...]:
        return self.beams[0]


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def corrupt_token(token: str, rng: random.Random, edits: int = 1) -> str:
    """Seeded edit-distance corruption of a normalized token; never the identity."""
    word = token
    for _ in range(edits):
        op = rng.randrange(4)
        i = rng.randrange(len(word)) if word else 0
        if op == 0 and len(word) >= 2:  # drop a character
            word = word[:i] + word[i + 1 :]
        elif op == 1 and word:  # substitute
            word = word[:i] + _LETTERS[rng.randrange(26)] + word[i + 1 :]
        elif op == 2:  # insert
            word = word[:i] + _LETTERS[rng.randrange(26)] + word[i:]
        elif len(word) >= 2 and i + 1 < len(word):  # swap neighbors
            word = word[:i] + word[i + 1] + word[i] + word[i + 2 :]
    if word == token or not word:
        word = token + _LETTERS[rng.randrange(26)] if token else _LETTERS[rng.randrange(26)]
    return word


def split_confusion_span(words: list[str], start_ms: int, end_ms: int) -> list[tuple[int, int]]:
    """Divide [start_ms, end_ms) among words proportionally to character length.

    Every span gets at least 1 ms as long as the window is wide enough for
    that (script token spans always are).
    """
    total = sum(len(w) for w in words) or 1
    n = len(words)
    spans = []
    t = start_ms
    acc = 0
    for i, w in enumerate(words):
        acc += len(w)
        e = end_ms if i == n - 1 else start_ms + (end_ms - start_ms) * acc // total
        e = max(e, t + 1)          # keep spans non-empty when possible
        e = min(e, end_ms - (n - 1 - i))  # leave room for the rest
        if e < t:
            e = t
        spans.append((t, e))
        t = e
    return spans


def chunk_seed(slice_tokens: list[ScriptToken]) -> int:
    """Content-derived divergence seed.

    Depends only on the decoded audio window, not on the session seed, so
    zero-jitter sessions are identical across seeds: network timing is the
    only noise source.
    """
    payload = "|".join(f"{t.start_ms}:{t.confused_form}" for t in slice_tokens)
    return zlib.crc32(payload.encode("utf-8"))


def recognize_chunk(
    script_slice: list[ScriptToken],
    n_best: int,
    divergence_seed: int,
    k_max: int = 3,
) -> HypothesisBeam:
    """Decode one chunk of scripted audio into an N-best beam set.

    The top beam emits every token's confused form; lower-ranked beams equal
    it except for their last K tokens (K seeded per beam, K <= k_max), where
    corrupted alternates stand in for unstable tails.
    """
    if n_best < 1:
        raise ValueError("n_best must be >= 1")
    top: list[BeamToken] = []
    for t in script_slice:
        words = t.confused_form.split()
        for (s, e), w in zip(split_confusion_span(words, t.start_ms, t.end_ms), words):
            top.append(BeamToken(text=w, start_ms=s, end_ms=e))
    beams: list[tuple[BeamToken, ...]] = [tuple(top)]
    for k in range(1, n_best):
        rng = random.Random(f"{divergence_seed}:{k}")
        alt = list(top)
        if alt:
            depth = min(rng.randint(1, k_max), len(alt))
            for i in range(len(alt) - depth, len(alt)):
                tok = alt[i]
                alt[i] = BeamToken(
                    text=corrupt_token(tok.text, rng),
                    start_ms=tok.start_ms,
                    end_ms=tok.end_ms,
                )
        beams.append(tuple(alt))
    return HypothesisBeam(beams=tuple(beams))


# --- script / reference-segment files -------------------------------------

def load_script(path: str | Path) -> Script:
    """Script file: ``start_ms<TAB>end_ms<TAB>ref_surface<TAB>confused_form<TAB>0|1``
    per token, ``#`` comments allowed."""
    path = Path(path)
    tokens = []
    for ln in path.read_text(encoding="utf-8").splitlines():
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        start, end, surface, confused, is_new = ln.split("\t")
        tokens.append(
            ScriptToken(
                ref_surface=surface,
                start_ms=int(start),
                end_ms=int(end),
                confused_form=confused,
                is_new_word=is_new.strip() == "1",
            )
        )
    return Script(tokens=tuple(tokens), name=path.stem)


def save_script(path: str | Path, script: Script) -> None:
    lines = [
        f"{t.start_ms}\t{t.end_ms}\t{t.ref_surface}\t{t.confused_form}\t{1 if t.is_new_word else 0}"
        for t in script.tokens
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class RefSegment:
    start_ms: int
    end_ms: int


def load_ref_segments(path: str | Path) -> list[RefSegment]:
    """Reference segments file: ``start_ms<TAB>end_ms`` per line."""
    out = []
    for ln in Path(path).read_text(encoding="utf-8").splitlines():
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        start, end = ln.split("\t")
        out.append(RefSegment(start_ms=int(start), end_ms=int(end)))
    return out


def save_ref_segments(path: str | Path, segments: list[RefSegment]) -> None:
    Path(path).write_text(
        "\n".join(f"{s.start_ms}\t{s.end_ms}" for s in segments) + "\n", encoding="utf-8"
    )


def segment_tokens(script: Script, segments: list[RefSegment]) -> list[list[ScriptToken]]:
    """Script tokens grouped by the reference segment containing them."""
    groups: list[list[ScriptToken]] = [[] for _ in segments]
    for t in script.tokens:
        for i, seg in enumerate(segments):
            if seg.start_ms <= t.start_ms < seg.end_ms:
                groups[i].append(t)
                break
    return groups
