"""Corpus access: manifest, scripts, reference segments, source documents.

A corpus root holds ``corpus.json`` plus script/refs/doc/slide files. The
bundled synthetic corpus is committed under ``corpus/`` at the repo root and
is the default when ``MEMBOOTH_CORPUS`` is unset.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from membooth.errors import MissingCorpusInput
from membooth.recognizer import RefSegment, Script, load_ref_segments, load_script
from membooth.vocab import SlideSchedule, TrainingVocabulary

ENV_CORPUS = "MEMBOOTH_CORPUS"


def resolve_corpus_root(explicit: Optional[str] = None) -> Path:
    """Explicit flag beats $MEMBOOTH_CORPUS beats ./corpus."""
    if explicit:
        root = Path(explicit)
        if not (root / "corpus.json").is_file():
            raise MissingCorpusInput(f"{root}/corpus.json not found")
        return root
    for cand in (os.environ.get(ENV_CORPUS), "corpus"):
        if cand and (Path(cand) / "corpus.json").is_file():
            return Path(cand)
    raise MissingCorpusInput(
        "no corpus found; pass --corpus or set MEMBOOTH_CORPUS to a directory "
        "containing corpus.json"
    )


@dataclass
class CorpusScript:
    """One talk with its evaluation references and optional source material."""

    name: str
    script: Script
    refs: list[RefSegment]
    vocab_path: Path
    doc_path: Optional[Path] = None
    slides_path: Optional[Path] = None
    alias_memory_path: Optional[Path] = None

    def document_text(self) -> str:
        if self.doc_path is None:
            raise MissingCorpusInput(f"script {self.name} has no source document")
        return self.doc_path.read_text(encoding="utf-8")

    def slide_schedule(self) -> SlideSchedule:
        if self.slides_path is None:
            raise MissingCorpusInput(f"script {self.name} has no slide schedule")
        return SlideSchedule.from_file(self.slides_path)

    def vocabulary(self) -> TrainingVocabulary:
        return TrainingVocabulary.from_file(self.vocab_path)

    def new_words(self) -> list[tuple[str, int]]:
        """Distinct new-word surfaces with first-occurrence start times, in order."""
        seen = {}
        for t in self.script.tokens:
            if t.is_new_word and t.ref_normalized not in seen:
                seen[t.ref_normalized] = (t.ref_surface, t.start_ms)
        return list(seen.values())

    def ref_token_groups(self) -> tuple[list[list[str]], list[list[str]]]:
        """(cased, normalized) reference tokens grouped by reference segment."""
        cased: list[list[str]] = [[] for _ in self.refs]
        norm: list[list[str]] = [[] for _ in self.refs]
        for t in self.script.tokens:
            for i, seg in enumerate(self.refs):
                if seg.start_ms <= t.start_ms < seg.end_ms:
                    cased[i].append(t.ref_surface)
                    norm[i].append(t.ref_normalized)
                    break
        return cased, norm


class Corpus:
    def __init__(self, root: Path, manifest: dict):
        self.root = Path(root)
        self.manifest = manifest
        self._cache: dict[str, CorpusScript] = {}

    @classmethod
    def load(cls, root: str | Path) -> "Corpus":
        root = Path(root)
        manifest_path = root / "corpus.json"
        if not manifest_path.is_file():
            raise MissingCorpusInput(f"{manifest_path} not found")
        return cls(root, json.loads(manifest_path.read_text(encoding="utf-8")))

    def names(self, set_name: Optional[str] = None) -> list[str]:
        if set_name is None:
            return list(self.manifest["scripts"])
        sets = self.manifest.get("sets", {})
        if set_name not in sets:
            raise MissingCorpusInput(f"corpus has no set {set_name!r}")
        return list(sets[set_name])

    def get(self, name: str) -> CorpusScript:
        if name in self._cache:
            return self._cache[name]
        scripts = self.manifest["scripts"]
        if name not in scripts:
            raise MissingCorpusInput(f"corpus has no script {name!r}")
        meta = scripts[name]
        def p(key):
            return self.root / meta[key] if meta.get(key) else None
        vocab_rel = meta.get("train_vocab") or self.manifest["train_vocab"]
        item = CorpusScript(
            name=name,
            script=load_script(self.root / meta["script"]),
            refs=load_ref_segments(self.root / meta["refs"]),
            vocab_path=self.root / vocab_rel,
            doc_path=p("doc"),
            slides_path=p("slides"),
            alias_memory_path=p("alias_memory"),
        )
        self._cache[name] = item
        return item
