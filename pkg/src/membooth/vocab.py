"""New-word list extraction: set difference of a document against the training vocabulary."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from membooth.errors import OutOfRange
from membooth.textnorm import normalize_token, strip_token, tokenize


@dataclass(frozen=True)
class TrainingVocabulary:
    """Set of normalized word forms the recognizer was trained on."""

    words: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_words(cls, words) -> "TrainingVocabulary":
        cleaned = {normalize_token(w) for w in words}
        cleaned.discard("")
        return cls(words=frozenset(cleaned))

    @classmethod
    def from_file(cls, path: str | Path) -> "TrainingVocabulary":
        text = Path(path).read_text(encoding="utf-8")
        return cls.from_words(text.split())


def is_new_word_candidate(normalized: str) -> bool:
    """Noise filter: at least 2 chars and at least one letter (drops pure numbers)."""
    return len(normalized) >= 2 and any(c.isalpha() for c in normalized)


def extract_new_words(document_text: str, vocab: TrainingVocabulary) -> list[str]:
    """Every distinct word of the document absent from the training vocabulary.

    Returns cased words (first-seen casing), in first-occurrence order,
    deduplicated by normalized form.
    """
    seen: set[str] = set()
    out: list[str] = []
    for raw in tokenize(document_text):
        norm = normalize_token(raw)
        if not norm or norm in seen:
            continue
        if not is_new_word_candidate(norm):
            continue
        if norm in vocab:
            continue
        seen.add(norm)
        out.append(strip_token(raw))
    return out


@dataclass(frozen=True)
class Slide:
    start_ms: int
    end_ms: int
    text: str


@dataclass(frozen=True)
class SlideSchedule:
    """Time-ordered, non-overlapping slides within [0, talk_end_ms]."""

    slides: tuple[Slide, ...]
    talk_end_ms: int

    def __post_init__(self):
        prev_end = 0
        for s in self.slides:
            if not (0 <= s.start_ms < s.end_ms <= self.talk_end_ms):
                raise ValueError(f"slide span [{s.start_ms}, {s.end_ms}) outside talk")
            if s.start_ms < prev_end:
                raise ValueError("slides overlap or are out of order")
            prev_end = s.end_ms

    @classmethod
    def from_file(cls, path: str | Path) -> "SlideSchedule":
        """Parse a schedule file: header line ``talk_end_ms<TAB>N`` then one
        ``start_ms<TAB>end_ms<TAB>text-file-path`` line per slide (paths are
        relative to the schedule file)."""
        path = Path(path)
        lines = [
            ln for ln in path.read_text(encoding="utf-8").splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")
        ]
        head = lines[0].split("\t")
        if head[0] != "talk_end_ms":
            raise ValueError(f"{path}: missing talk_end_ms header")
        talk_end = int(head[1])
        slides = []
        for ln in lines[1:]:
            start, end, rel = ln.split("\t")
            text = (path.parent / rel).read_text(encoding="utf-8")
            slides.append(Slide(start_ms=int(start), end_ms=int(end), text=text))
        return cls(slides=tuple(slides), talk_end_ms=talk_end)


def window_slides(schedule: SlideSchedule, now: int) -> str:
    """Text of the slide active at ``now`` plus its immediate neighbors.

    Between slides the most recently shown slide anchors the window; before the
    first slide the first slide does.
    """
    if not 0 <= now <= schedule.talk_end_ms:
        raise OutOfRange(f"now={now} outside [0, {schedule.talk_end_ms}]")
    slides = schedule.slides
    if not slides:
        return ""
    anchor = 0
    for i, s in enumerate(slides):
        if s.start_ms <= now < s.end_ms:
            anchor = i
            break
        if s.end_ms <= now:
            anchor = i
    parts = [
        slides[j].text
        for j in (anchor - 1, anchor, anchor + 1)
        if 0 <= j < len(slides)
    ]
    return "\n".join(parts)
