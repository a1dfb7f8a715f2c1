"""Runtime-mutable word/phrase memory with instant add/remove and immutable snapshots."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

from membooth.errors import EmptySurface, PhraseTooLong
from membooth.textnorm import normalize_phrase, strip_token

MAX_PHRASE_WORDS = 4


@dataclass(frozen=True)
class MemoryEntry:
    """One memory entry: cased surface, normalized key, confused-form aliases."""

    surface: str
    normalized: str
    aliases: tuple[str, ...] = ()
    extended: bool = False
    added_at: int = 0

    def to_dict(self) -> dict:
        return {
            "surface": self.surface,
            "normalized": self.normalized,
            "aliases": list(self.aliases),
            "extended": self.extended,
            "added_at": self.added_at,
        }


@dataclass(frozen=True)
class MemorySnapshot:
    """Immutable view of the store at one version; decoding always works on these."""

    entries: tuple[MemoryEntry, ...]
    version: int

    def get(self, normalized: str) -> MemoryEntry | None:
        return self._by_key().get(normalized)

    def _by_key(self) -> dict[str, MemoryEntry]:
        # Cached lazily; object.__setattr__ because the dataclass is frozen.
        cache = self.__dict__.get("_key_cache")
        if cache is None:
            cache = {e.normalized: e for e in self.entries}
            object.__setattr__(self, "_key_cache", cache)
        return cache


def _make_entry(surface: str, aliases, extended: bool, now: int) -> MemoryEntry:
    words = surface.split()
    stripped = [strip_token(w) for w in words]
    stripped = [w for w in stripped if w]
    normalized = normalize_phrase(surface)
    if not normalized:
        raise EmptySurface(f"surface {surface!r} normalizes to nothing")
    if len(normalized.split()) > MAX_PHRASE_WORDS:
        raise PhraseTooLong(f"surface {surface!r} exceeds {MAX_PHRASE_WORDS} words")
    cased = " ".join(stripped)
    norm_aliases = []
    for a in aliases or ():
        na = normalize_phrase(a)
        if na and na != normalized and na not in norm_aliases:
            norm_aliases.append(na)
    return MemoryEntry(
        surface=cased,
        normalized=normalized,
        aliases=tuple(norm_aliases),
        extended=extended,
        added_at=now,
    )


class MemoryStore:
    """Word/phrase memory keyed by normalized form.

    One writer at a time (mutations take a lock); snapshots are immutable and
    safe to read from any number of concurrent decoders.
    """

    def __init__(self) -> None:
        self._entries: dict[str, MemoryEntry] = {}
        self._directory: dict[str, str] = {}  # every surface ever added, survives removal
        self._version = 0
        self._lock = threading.Lock()

    @property
    def version(self) -> int:
        return self._version

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, normalized: str) -> bool:
        return normalized in self._entries

    def add_entry(
        self,
        surface: str,
        aliases=(),
        extended: bool = False,
        added_at: int = 0,
    ) -> MemoryEntry:
        """Add an entry, merging with an existing one of the same normalized form.

        Merge keeps the first-seen surface casing and added_at, unions aliases,
        and ORs the extended flag. Bumps the store version.
        """
        entry = _make_entry(surface, aliases, extended, added_at)
        with self._lock:
            old = self._entries.get(entry.normalized)
            if old is not None:
                merged_aliases = list(old.aliases)
                for a in entry.aliases:
                    if a not in merged_aliases:
                        merged_aliases.append(a)
                entry = MemoryEntry(
                    surface=old.surface,
                    normalized=old.normalized,
                    aliases=tuple(merged_aliases),
                    extended=old.extended or entry.extended,
                    added_at=old.added_at,
                )
            self._entries[entry.normalized] = entry
            self._directory[entry.normalized] = entry.surface
            self._version += 1
        return entry

    def remove_entry(self, normalized: str) -> bool:
        """Remove by normalized form; returns whether anything was removed."""
        key = normalize_phrase(normalized)
        with self._lock:
            if key in self._entries:
                del self._entries[key]
                self._version += 1
                return True
            return False

    def snapshot(self) -> MemorySnapshot:
        """Immutable snapshot of the current entries at the current version."""
        with self._lock:
            return MemorySnapshot(entries=tuple(self._entries.values()), version=self._version)

    def directory(self) -> dict[str, str]:
        """normalized -> surface for everything ever added.

        Removal does not prune it, so casing lookups for already-emitted
        memory hits keep working after the entry is gone.
        """
        with self._lock:
            return dict(self._directory)


def load_memory_file(path: str | Path, store: MemoryStore | None = None, now: int = 0) -> MemoryStore:
    """Load a memory list file.

    One entry per line: ``surface[TAB]alias1,alias2[TAB]extended:true|false``
    with fields 2-3 optional; ``#`` starts a comment line.
    """
    store = store if store is not None else MemoryStore()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        surface = fields[0]
        aliases: list[str] = []
        extended = False
        for fld in fields[1:]:
            fld = fld.strip()
            if not fld:
                continue
            if fld.startswith("extended:"):
                extended = fld[len("extended:"):].strip().lower() == "true"
            else:
                aliases.extend(a.strip() for a in fld.split(",") if a.strip())
        store.add_entry(surface, aliases=aliases, extended=extended, added_at=now)
    return store


def save_memory_file(path: str | Path, snapshot: MemorySnapshot) -> None:
    """Write a snapshot in the memory list format (round-trips through load)."""
    lines = []
    for e in snapshot.entries:
        fields = [e.surface]
        if e.aliases or e.extended:
            fields.append(",".join(e.aliases))
        if e.extended:
            fields.append("extended:true")
        lines.append("\t".join(fields))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
