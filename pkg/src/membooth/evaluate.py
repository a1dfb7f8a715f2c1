"""Segment alignment (minimum word edit distance), WER, and new-word scoring.

The emitted stream is unsegmented, so WER is computed after splitting it into
one contiguous (possibly empty) piece per reference segment such that the
total word-level edit distance is minimal. New-word recall/precision/F1 then
count occurrences piece-locally against the aligned reference segment.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from membooth._kernels import INF, segment_pass
from membooth.errors import EmptyReference


def word_edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Unit-cost edit distance over token sequences."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, wa in enumerate(a):
        row = [i + 1]
        for j, wb in enumerate(b):
            sub = prev[j] + (0 if wa == wb else 1)
            row.append(min(sub, prev[j + 1] + 1, row[j] + 1))
        prev = row
    return prev[-1]


@dataclass(frozen=True)
class SegmentAlignment:
    """Hypothesis split against reference segments.

    ``boundaries`` has ``len(refs) + 1`` entries with 0 first and ``len(hyp)``
    last; piece k is ``hyp[boundaries[k]:boundaries[k + 1]]``.
    """

    boundaries: tuple[int, ...]
    total_edit_distance: int

    def pieces(self, hyp: Sequence) -> list:
        return [
            list(hyp[self.boundaries[k] : self.boundaries[k + 1]])
            for k in range(len(self.boundaries) - 1)
        ]


def _ids(hyp: Sequence[str], refs: Sequence[Sequence[str]]):
    table: dict[str, int] = {}
    def enc(w: str) -> int:
        return table.setdefault(w, len(table))
    return [enc(w) for w in hyp], [[enc(w) for w in seg] for seg in refs]


def segment_mwer(hyp: Sequence[str], refs: Sequence[Sequence[str]]) -> SegmentAlignment:
    """Minimum-total-edit-distance split of ``hyp`` into ``len(refs)`` pieces.

    Dynamic program over (hypothesis position, segment index); each segment
    costs one free-start alignment pass. Boundary ties resolve to the
    earliest cut, so the boundary vector is the lexicographically smallest
    among the optima.
    """
    if not refs:
        raise EmptyReference("refs must be non-empty")
    hyp_ids, ref_ids = _ids(hyp, refs)
    n, m = len(hyp_ids), len(ref_ids)

    # backward[k][i] = cost of aligning refs[k:] against hyp[i:]
    rev_hyp = hyp_ids[::-1]
    backward: list[list[int]] = [[INF] * n + [0]]
    for seg in reversed(ref_ids):
        nxt = backward[0]
        rev_init = nxt[::-1]
        g = segment_pass(rev_hyp, seg[::-1], rev_init)
        backward.insert(0, g[::-1])
    total = backward[0][0]

    boundaries = [0]
    for k in range(m - 1):
        start = boundaries[-1]
        init = [INF] * (n + 1)
        init[start] = 0
        row = segment_pass(hyp_ids, ref_ids[k], init)
        want = backward[k][start]
        for j in range(start, n + 1):
            if row[j] + backward[k + 1][j] == want:
                boundaries.append(j)
                break
        else:  # pragma: no cover - DP consistency violation
            raise AssertionError("no boundary reproduces the optimal cost")
    boundaries.append(n)
    return SegmentAlignment(boundaries=tuple(boundaries), total_edit_distance=total)


def wer(alignment: SegmentAlignment, refs: Sequence[Sequence[str]]) -> float:
    total_ref = sum(len(seg) for seg in refs)
    if total_ref == 0:
        raise EmptyReference("references contain zero words")
    return alignment.total_edit_distance / total_ref


@dataclass(frozen=True)
class HypToken:
    """Evaluation view of one emitted word."""

    normalized: str
    display: str = ""
    memory_hit: bool = False


@dataclass
class NewWordReport:
    subset: str  # all_transcript_new_words | intersected_with_source
    tp: int = 0
    fp: int = 0
    fn: int = 0
    casing_correct: int = 0
    casing_total: int = 0
    vacuous: bool = False
    per_word: dict = field(default_factory=dict)  # word -> [tp, fp, fn]

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 1.0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 1.0

    @property
    def f1(self) -> float:
        pr = self.precision + self.recall
        return 2 * self.precision * self.recall / pr if pr > 0 else 0.0

    @property
    def casing_accuracy(self) -> float:
        return self.casing_correct / self.casing_total if self.casing_total else 1.0

    def metrics(self) -> dict:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "f1": self.f1,
            "casing_accuracy": self.casing_accuracy,
            "tp": float(self.tp),
            "fp": float(self.fp),
            "fn": float(self.fn),
        }


def merge_reports(reports: Sequence[NewWordReport]) -> NewWordReport:
    """Micro-aggregation: sum counts across scripts before taking ratios."""
    out = NewWordReport(subset=reports[0].subset if reports else "all_transcript_new_words")
    for r in reports:
        out.tp += r.tp
        out.fp += r.fp
        out.fn += r.fn
        out.casing_correct += r.casing_correct
        out.casing_total += r.casing_total
        for w, (tp, fp, fn) in r.per_word.items():
            acc = out.per_word.setdefault(w, [0, 0, 0])
            acc[0] += tp
            acc[1] += fp
            acc[2] += fn
    out.vacuous = all(r.vacuous for r in reports) if reports else True
    return out


def new_word_metrics(
    alignment: SegmentAlignment,
    refs_cased: Sequence[Sequence[str]],
    refs_norm: Sequence[Sequence[str]],
    hyp: Sequence[HypToken],
    new_words: set,
    source_words: Optional[set] = None,
) -> NewWordReport:
    """Segment-local occurrence counting over the evaluation word set.

    Per segment and word: TP += min(ref count, hyp count), misses and spurious
    emissions make FN/FP. Casing compares display forms of paired occurrences.
    """
    eval_set = new_words if source_words is None else new_words & source_words
    subset = "all_transcript_new_words" if source_words is None else "intersected_with_source"
    report = NewWordReport(subset=subset)
    pieces = alignment.pieces(hyp)
    for seg_cased, seg_norm, piece in zip(refs_cased, refs_norm, pieces):
        ref_counts = Counter(w for w in seg_norm if w in eval_set)
        hyp_counts = Counter(t.normalized for t in piece if t.normalized in eval_set)
        for w in set(ref_counts) | set(hyp_counts):
            c_ref = ref_counts[w]
            c_hyp = hyp_counts[w]
            tp = min(c_ref, c_hyp)
            acc = report.per_word.setdefault(w, [0, 0, 0])
            acc[0] += tp
            acc[1] += max(0, c_hyp - c_ref)
            acc[2] += max(0, c_ref - c_hyp)
            report.tp += tp
            report.fp += max(0, c_hyp - c_ref)
            report.fn += max(0, c_ref - c_hyp)
            if tp:
                ref_forms = Counter(
                    c for c, n in zip(seg_cased, seg_norm) if n == w
                )
                hyp_forms = Counter(
                    t.display for t in piece if t.normalized == w and t.display
                )
                matched = sum((ref_forms & hyp_forms).values())
                report.casing_correct += min(matched, tp)
                report.casing_total += tp
    report.vacuous = report.tp + report.fp + report.fn == 0
    return report


@dataclass(frozen=True)
class AggregateStat:
    mean: float
    std: float
    n: int


def aggregate_runs(rows: Sequence[Mapping[str, float]]) -> dict[str, AggregateStat]:
    """Per-metric mean and population standard deviation across seeds."""
    if not rows:
        raise ValueError("need at least one run")
    out: dict[str, AggregateStat] = {}
    for key in rows[0]:
        vals = [float(r[key]) for r in rows]
        std = statistics.pstdev(vals) if len(vals) > 1 else 0.0
        out[key] = AggregateStat(mean=statistics.fmean(vals), std=std, n=len(vals))
    return out
