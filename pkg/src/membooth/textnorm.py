"""Token normalization shared by extraction, the memory and the matcher."""

import unicodedata


def normalize_token(raw: str) -> str:
    """Normalized form of one whitespace-free token; empty string means "not a word".

    Lowercases, applies Unicode NFKC, and strips leading/trailing characters
    that are neither letters nor digits. Interior punctuation (hyphens,
    apostrophes, etc.) is kept.
    """
    s = unicodedata.normalize("NFKC", raw).lower()
    start, end = 0, len(s)
    while start < end and not s[start].isalnum():
        start += 1
    while end > start and not s[end - 1].isalnum():
        end -= 1
    return s[start:end]


def strip_token(raw: str) -> str:
    """Like :func:`normalize_token` but case-preserving (the memory surface form)."""
    s = unicodedata.normalize("NFKC", raw)
    start, end = 0, len(s)
    while start < end and not s[start].isalnum():
        start += 1
    while end > start and not s[end - 1].isalnum():
        end -= 1
    return s[start:end]


def normalize_phrase(raw: str) -> str:
    """Normalize each whitespace-separated word and rejoin with single spaces."""
    words = [normalize_token(w) for w in raw.split()]
    return " ".join(w for w in words if w)


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization."""
    return text.split()
