"""Casing and punctuation reconstruction over emitted normalized tokens.

Rule-based stand-in for a learned casing/punctuation model. Memory hits take
the entry's surface casing verbatim and are never re-cased, even sentence
initially: a lowercase-leading entry stays lowercase after a period.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence, Union

from membooth.errors import DanglingProvenance
from membooth.matching import DecodedToken
from membooth.memory import MemorySnapshot
from membooth.textnorm import normalize_token

GAP_PERIOD_MS = 700

# normalized -> surface; either a snapshot or a plain directory works
CasingSource = Union[MemorySnapshot, Mapping[str, str]]


@dataclass(frozen=True)
class CasedToken:
    text: str
    trailing_punct: str = "none"  # none | period | comma | question
    source: str = "rule"  # rule | memory
    start_ms: int = 0
    end_ms: int = 0

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "trailing_punct": self.trailing_punct,
            "source": self.source,
        }


def load_uppercase_lexicon(path: str | Path) -> frozenset:
    """Always-uppercase word list: one word per line."""
    words = Path(path).read_text(encoding="utf-8").split()
    return frozenset(normalize_token(w) for w in words if w)


def _surface_for(source: CasingSource, normalized: str) -> str:
    if isinstance(source, MemorySnapshot):
        entry = source.get(normalized)
        if entry is None:
            raise DanglingProvenance(f"memory_hit on unknown entry {normalized!r}")
        return entry.surface
    try:
        return source[normalized]
    except KeyError:
        raise DanglingProvenance(f"memory_hit on unknown entry {normalized!r}") from None


def _rule_case(word: str, sentence_initial: bool, uppercase: frozenset) -> str:
    if word in uppercase:
        return word.upper()
    if sentence_initial and word:
        return word[0].upper() + word[1:]
    return word


def apply_casing(
    tokens: Sequence[DecodedToken],
    source: CasingSource,
    sentence_initial: bool = True,
    uppercase_lexicon: frozenset = frozenset(),
) -> list[CasedToken]:
    """Case one emitted token run; ``sentence_initial`` carries across calls."""
    out: list[CasedToken] = []
    run_entry = None  # (entry_normalized, word index) across a multi-word hit
    run_pos = 0
    for tok in tokens:
        prov = tok.provenance
        if prov.kind == "memory_hit":
            surface_words = _surface_for(source, prov.entry_normalized).split()
            if run_entry != prov.entry_normalized:
                run_entry, run_pos = prov.entry_normalized, 0
            word = surface_words[run_pos % len(surface_words)] if surface_words else tok.text
            run_pos += 1
            out.append(
                CasedToken(
                    text=word, source="memory", start_ms=tok.start_ms, end_ms=tok.end_ms
                )
            )
        else:
            run_entry = None
            out.append(
                CasedToken(
                    text=_rule_case(tok.text, sentence_initial, uppercase_lexicon),
                    source="rule",
                    start_ms=tok.start_ms,
                    end_ms=tok.end_ms,
                )
            )
        sentence_initial = False
    return out


def punctuate(
    tokens: Sequence[CasedToken],
    gaps_ms: Sequence[int],
    gap_period_ms: int = GAP_PERIOD_MS,
    end_of_session: bool = True,
) -> list[CasedToken]:
    """Insert periods at long inter-token gaps; re-case what follows.

    ``gaps_ms[i]`` is the silence after token i (length == len(tokens) - 1).
    Only rule-sourced tokens are re-cased after a period; memory casing wins.
    """
    if any(g < 0 for g in gaps_ms):
        raise ValueError("gaps must be >= 0")
    out = list(tokens)
    for i, gap in enumerate(gaps_ms):
        if gap >= gap_period_ms:
            out[i] = replace(out[i], trailing_punct="period")
            nxt = out[i + 1]
            if nxt.source == "rule" and nxt.text:
                out[i + 1] = replace(nxt, text=nxt.text[0].upper() + nxt.text[1:])
    if out and end_of_session:
        out[-1] = replace(out[-1], trailing_punct="period")
    return out


def case_and_punctuate(
    tokens: Sequence[DecodedToken],
    source: CasingSource,
    uppercase_lexicon: frozenset = frozenset(),
    gap_period_ms: int = GAP_PERIOD_MS,
) -> list[CasedToken]:
    """Full batch pipeline over a complete emitted stream with timings."""
    cased = apply_casing(tokens, source, True, uppercase_lexicon)
    gaps = [
        max(0, tokens[i + 1].start_ms - tokens[i].end_ms) for i in range(len(tokens) - 1)
    ]
    return punctuate(cased, gaps, gap_period_ms)


def render_text(tokens: Sequence[CasedToken]) -> str:
    """Plain-text rendering: words, punctuation marks, single spaces."""
    marks = {"period": ".", "comma": ",", "question": "?", "none": ""}
    return " ".join(t.text + marks[t.trailing_punct] for t in tokens)
