"""Executable experiment scenarios and the scripted operator agent.

An approach decides what goes into the memory and when: nothing, the full
new-word list at t=0, scheduled adds just before or reactive adds just after
each first occurrence, extended-entry variants of those, document or slide
sources, or k random vocabulary words for the degradation sweep.
"""

from __future__ import annotations

import csv
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from membooth.corpus import Corpus, CorpusScript
from membooth.errors import ConfigError, MissingCorpusInput
from membooth.evaluate import (
    HypToken,
    NewWordReport,
    aggregate_runs,
    merge_reports,
    new_word_metrics,
    segment_mwer,
    wer as compute_wer,
)
from membooth.matching import DEFAULT_THETA, Matcher
from membooth.memory import MemoryStore, load_memory_file
from membooth.stream import (
    ChunkPolicy,
    EmissionMode,
    JitterSpec,
    MemoryMutation,
    StreamSession,
    parse_mode,
)
from membooth.vocab import extract_new_words, window_slides

APPROACHES = (
    "empty",
    "oracle",
    "oracle_after_occ",
    "oracle_before_occ",
    "oracle_ext_after_occ",
    "oracle_ext_before_occ",
    "source_paper",
    "source_slides",
    "source_curr_slides",
    "alias_memory",
)

BEFORE_OCC_MARGIN_MS = 500
DEFAULT_REACTION_MS = 2000


def parse_approach(text: str) -> tuple[str, Optional[int]]:
    """``"random_memory:500"`` -> ``("random_memory", 500)``; plain names pass through."""
    if text.startswith("random_memory"):
        _, _, arg = text.partition(":")
        if not arg:
            raise ConfigError("random_memory needs a k, e.g. random_memory:100")
        try:
            k = int(arg)
        except ValueError:
            raise ConfigError(f"bad random_memory k: {arg!r}") from None
        if k < 0:
            raise ConfigError("random_memory k must be >= 0")
        return "random_memory", k
    if text not in APPROACHES:
        raise ConfigError(f"unknown approach {text!r}")
    return text, None


@dataclass(frozen=True)
class ScenarioConfig:
    approach: str
    scripts: tuple[str, ...]
    seeds: tuple[int, ...] = (0,)
    theta: float = DEFAULT_THETA
    min_chunk_ms: int = 1000
    jitter: Optional[JitterSpec] = None
    mode: str = "ship"
    reaction_latency_ms: int = DEFAULT_REACTION_MS
    name: Optional[str] = None

    def __post_init__(self):
        parse_approach(self.approach)
        parse_mode(self.mode)
        if self.reaction_latency_ms < 0:
            raise ConfigError("reaction latency must be >= 0")
        if not self.scripts:
            raise ConfigError("scenario needs at least one script")

    @property
    def label(self) -> str:
        return self.name or self.approach

    def policy(self) -> ChunkPolicy:
        jitter = self.jitter if self.jitter is not None else JitterSpec()
        return ChunkPolicy(min_chunk_ms=self.min_chunk_ms, jitter=jitter)

    def emission_mode(self) -> EmissionMode:
        return parse_mode(self.mode)


@dataclass(frozen=True)
class OperatorAgent:
    reaction_latency_ms: int = DEFAULT_REACTION_MS
    policy: str = "add_new_word_on_miss"

    def __post_init__(self):
        if self.reaction_latency_ms < 0:
            raise ConfigError("reaction latency must be >= 0")
        if self.policy not in ("add_new_word_on_miss", "also_add_extended_on_false_positive"):
            raise ConfigError(f"unknown operator policy {self.policy!r}")

    @property
    def extended_enabled(self) -> bool:
        return self.policy == "also_add_extended_on_false_positive"


def _common_windows_matching(item: CorpusScript, theta: float) -> list[str]:
    """Common-word reference windows that a plain oracle memory would rewrite."""
    oracle = MemoryStore()
    for surface, _at in item.new_words():
        oracle.add_entry(surface)
    matcher = Matcher(theta=theta)
    matcher._index(oracle.snapshot())
    tokens = list(item.script.tokens)
    hits: list[str] = []
    seen: set = set()
    for i, t in enumerate(tokens):
        if t.is_new_word:
            continue
        for j in range(i, min(i + 4, len(tokens))):
            span = tokens[i : j + 1]
            if any(s.is_new_word for s in span):
                break
            window = " ".join(s.ref_normalized for s in span)
            cand = matcher._best_candidate(window)
            if cand is not None:
                for s in span:
                    if s.ref_normalized not in seen:
                        seen.add(s.ref_normalized)
                        hits.append(s.ref_surface)
    return hits


def build_initial_memory(config: ScenarioConfig, item: CorpusScript, seed: int = 0) -> list[MemoryMutation]:
    """The scheduled memory mutations an approach performs on its own."""
    kind, k = parse_approach(config.approach)
    muts: list[MemoryMutation] = []

    def add(at_ms, surface, aliases=(), extended=False, origin="schedule"):
        muts.append(
            MemoryMutation(
                at_ms=at_ms, action="add", surface=surface,
                aliases=tuple(aliases), extended=extended, origin=origin,
            )
        )

    if kind in ("empty", "oracle_after_occ", "oracle_ext_after_occ"):
        return muts
    if kind == "oracle":
        for surface, _at in item.new_words():
            add(0, surface)
    elif kind == "oracle_before_occ":
        for surface, at in item.new_words():
            add(max(0, at - BEFORE_OCC_MARGIN_MS), surface)
    elif kind == "oracle_ext_before_occ":
        for surface, at in item.new_words():
            add(max(0, at - BEFORE_OCC_MARGIN_MS), surface)
        for surface in _common_windows_matching(item, config.theta):
            add(0, surface, extended=True, origin="ext_precompute")
    elif kind == "source_paper":
        for surface in extract_new_words(item.document_text(), item.vocabulary()):
            add(0, surface, origin="source_paper")
    elif kind == "source_slides":
        schedule = item.slide_schedule()
        text = "\n".join(s.text for s in schedule.slides)
        for surface in extract_new_words(text, item.vocabulary()):
            add(0, surface, origin="source_slides")
    elif kind == "source_curr_slides":
        schedule = item.slide_schedule()
        vocab = item.vocabulary()
        active: dict[str, str] = {}
        times = sorted({s.start_ms for s in schedule.slides})
        for at in times:
            visible = {}
            for surface in extract_new_words(window_slides(schedule, at), vocab):
                visible[surface.lower()] = surface
            for key in sorted(set(active) - set(visible)):
                muts.append(
                    MemoryMutation(
                        at_ms=at, action="remove", surface=active.pop(key),
                        origin="slide_window",
                    )
                )
            for key in sorted(set(visible) - set(active)):
                active[key] = visible[key]
                add(at, visible[key], origin="slide_window")
    elif kind == "alias_memory":
        if item.alias_memory_path is None:
            raise MissingCorpusInput(f"script {item.name} has no alias memory file")
        for e in load_memory_file(item.alias_memory_path).snapshot().entries:
            add(0, e.surface, aliases=e.aliases, extended=e.extended, origin="alias_file")
    elif kind == "random_memory":
        script_words = {t.ref_normalized for t in item.script.tokens}
        pool = sorted(item.vocabulary().words - script_words)
        if k > len(pool):
            raise ConfigError(f"random_memory k={k} exceeds vocabulary pool ({len(pool)})")
        rng = random.Random(seed)
        for w in rng.sample(pool, k):
            add(0, w, origin="random")
    return muts


class _OperatorState:
    """Watches emitted segments and injects corrections, like a human would."""

    def __init__(self, agent: OperatorAgent, item: CorpusScript):
        self.agent = agent
        self.tokens = list(item.script.tokens)
        self.added: set = set()
        self.log: list[dict] = []

    def _overlapping(self, start_ms: int, end_ms: int):
        return [t for t in self.tokens if t.start_ms < end_ms and t.end_ms > start_ms]

    def __call__(self, session: StreamSession, event) -> None:
        if event.kind != "segment":
            return
        seg = event.payload
        if seg.status != "stable":
            return
        now = session.now
        at = now + self.agent.reaction_latency_ms
        emitted = list(seg.tokens)

        for ref in self._overlapping(seg.script_start_ms, seg.script_end_ms):
            if not ref.is_new_word or ref.ref_normalized in self.added:
                continue
            hit = any(
                tok.text == ref.ref_normalized
                and tok.start_ms < ref.end_ms
                and tok.end_ms > ref.start_ms
                for tok in emitted
            )
            if not hit:
                self.added.add(ref.ref_normalized)
                session.inject(
                    MemoryMutation(at_ms=at, action="add", surface=ref.ref_surface,
                                   origin="operator_miss")
                )
                self.log.append(
                    {"at_ms": at, "trigger": "miss", "surface": ref.ref_surface,
                     "segment_id": seg.segment_id}
                )

        if not self.agent.extended_enabled:
            return
        for tok in emitted:
            if tok.provenance.kind != "memory_hit":
                continue
            refs = self._overlapping(tok.start_ms, tok.end_ms)
            if not refs or any(r.ref_normalized == tok.provenance.entry_normalized for r in refs):
                continue
            for r in refs:
                if r.is_new_word or r.ref_normalized in self.added:
                    continue
                self.added.add(r.ref_normalized)
                session.inject(
                    MemoryMutation(at_ms=at, action="add", surface=r.ref_surface,
                                   extended=True, origin="operator_false_positive")
                )
                self.log.append(
                    {"at_ms": at, "trigger": "false_positive", "surface": r.ref_surface,
                     "segment_id": seg.segment_id,
                     "entry": tok.provenance.entry_normalized}
                )


def run_operator_loop(session: StreamSession, agent: OperatorAgent, item: CorpusScript) -> list[dict]:
    """Drive the session with the agent observing; returns the mutation log."""
    state = _OperatorState(agent, item)
    for ev in session.events():
        session._events.append(ev)
        state(session, ev)
    return state.log


@dataclass
class RunResult:
    config_label: str
    script: str
    seed: int
    wer: float
    mwer_distance: int
    ref_words: int
    report: NewWordReport
    operator_log: list[dict] = field(default_factory=list)
    error: Optional[str] = None

    def metrics(self) -> dict:
        out = {
            "approach": self.config_label, "script": self.script, "seed": self.seed,
            "wer": self.wer, "mwer_distance": self.mwer_distance,
            "ref_words": self.ref_words,
        }
        out.update(self.report.metrics())
        return out


def _agent_for(config: ScenarioConfig) -> Optional[OperatorAgent]:
    kind, _ = parse_approach(config.approach)
    if kind == "oracle_after_occ":
        return OperatorAgent(config.reaction_latency_ms)
    if kind == "oracle_ext_after_occ":
        return OperatorAgent(config.reaction_latency_ms,
                             policy="also_add_extended_on_false_positive")
    return None


def evaluate_session(item: CorpusScript, session: StreamSession,
                     source_words: Optional[set] = None) -> tuple[float, int, int, NewWordReport]:
    """Score a finished session: word error rate plus the new-word report."""
    hyp = session.final_tokens()
    cased = session.final_cased()
    if len(cased) != len(hyp):
        raise AssertionError("cased output length mismatch")
    hyp_norm = [t.text for t in hyp]
    hyp_eval = [
        HypToken(normalized=t.text, display=c.text,
                 memory_hit=t.provenance.kind == "memory_hit")
        for t, c in zip(hyp, cased)
    ]
    refs_cased, refs_norm = item.ref_token_groups()
    alignment = segment_mwer(hyp_norm, refs_norm)
    n_ref = sum(len(r) for r in refs_norm)
    rate = compute_wer(alignment, refs_norm)
    new_words = {t.ref_normalized for t in item.script.tokens if t.is_new_word}
    report = new_word_metrics(alignment, refs_cased, refs_norm,
                              hyp_eval, new_words, source_words)
    return rate, alignment.total_edit_distance, n_ref, report


def run_scenario_session(config: ScenarioConfig, item: CorpusScript,
                         seed: int) -> tuple[StreamSession, list[dict]]:
    """Build and drive one session to completion; returns it with the operator log."""
    schedule = build_initial_memory(config, item, seed=seed)
    session = StreamSession(
        script=item.script,
        policy=config.policy(),
        store=MemoryStore(),
        theta=config.theta,
        mode=config.emission_mode(),
        schedule=schedule,
        seed=seed,
    )
    agent = _agent_for(config)
    op_log: list[dict] = []
    if agent is not None:
        op_log = run_operator_loop(session, agent, item)
    else:
        session.run()
    return session, op_log


def run_scenario_once(config: ScenarioConfig, item: CorpusScript, seed: int,
                      source_words: Optional[set] = None) -> RunResult:
    session, op_log = run_scenario_session(config, item, seed)
    rate, dist, n_ref, report = evaluate_session(item, session, source_words)
    return RunResult(config.label, item.name, seed, rate, dist, n_ref, report, op_log)


def _matrix_cell(args):
    root, config, script_name, seed = args
    corpus = Corpus.load(root)
    item = corpus.get(script_name)
    try:
        return run_scenario_once(config, item, seed)
    except Exception as exc:  # failed cells must not sink the matrix
        return RunResult(config.label, script_name, seed, float("nan"), 0, 0,
                         NewWordReport(subset="all_transcript_new_words"),
                         error=f"{type(exc).__name__}: {exc}")


def seed_summary(batch: list[RunResult]) -> dict:
    """Pool one seed's runs across scripts: micro-merged counts, pooled WER."""
    dist = sum(r.mwer_distance for r in batch)
    words = sum(r.ref_words for r in batch)
    merged = merge_reports([r.report for r in batch])
    return {
        "wer": dist / words if words else float("nan"),
        "f1": merged.f1,
        "recall": merged.recall,
        "precision": merged.precision,
        "casing_accuracy": merged.casing_accuracy,
        "fp": float(merged.fp),
    }


@dataclass
class MatrixResult:
    runs: list[RunResult]
    aggregates: list[dict]
    curve: list[dict]

    def failed(self) -> list[RunResult]:
        return [r for r in self.runs if r.error]


def run_matrix(configs: list[ScenarioConfig], corpus: Corpus,
               out_dir: Optional[str | Path] = None,
               parallel: Optional[int] = None) -> MatrixResult:
    """Run every config x script x seed cell; aggregate per config over seeds."""
    cells = [
        (str(corpus.root), cfg, script, seed)
        for cfg in configs for seed in cfg.seeds for script in cfg.scripts
    ]
    if parallel and parallel > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            runs = list(pool.map(_matrix_cell, cells, chunksize=1))
    else:
        runs = [_matrix_cell(c) for c in cells]

    aggregates = []
    curve = []
    for cfg in configs:
        mine = [r for r in runs if r.config_label == cfg.label]
        ok = [r for r in mine if not r.error]
        seed_rows = []
        for seed in cfg.seeds:
            batch = [r for r in ok if r.seed == seed]
            if not batch:
                continue
            seed_rows.append(seed_summary(batch))
        row = {"approach": cfg.label, "n_runs": len(ok), "n_failed": len(mine) - len(ok)}
        if seed_rows:
            for metric, stat in aggregate_runs(seed_rows).items():
                row[f"{metric}_mean"] = stat.mean
                row[f"{metric}_std"] = stat.std
        row["fp_total"] = sum(r.report.fp for r in ok)
        aggregates.append(row)
        kind, k = parse_approach(cfg.approach)
        if kind == "random_memory" and seed_rows:
            curve.append(
                {"k": k, "wer_mean": row["wer_mean"], "wer_std": row["wer_std"]}
            )
    curve.sort(key=lambda c: c["k"])

    result = MatrixResult(runs=runs, aggregates=aggregates, curve=curve)
    if out_dir is not None:
        _write_matrix(Path(out_dir), result)
    return result


def _write_matrix(out: Path, result: MatrixResult) -> None:
    out.mkdir(parents=True, exist_ok=True)
    agg_path = out / "aggregate.csv"
    if result.aggregates:
        cols = list(result.aggregates[0])
        with agg_path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            w.writerows(result.aggregates)
    runs_path = out / "runs.jsonl"
    with runs_path.open("w", encoding="utf-8") as fh:
        for r in result.runs:
            row = r.metrics()
            if r.error:
                row["error"] = r.error
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    if result.curve:
        (out / "wer_curve.json").write_text(
            json.dumps(result.curve, indent=1) + "\n", encoding="utf-8"
        )
