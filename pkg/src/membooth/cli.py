"""Command line front end: extract, run, matrix, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from membooth.corpus import Corpus, resolve_corpus_root
from membooth.errors import ConfigError, MemboothError, MissingCorpusInput
from membooth.matching import DEFAULT_THETA
from membooth.scenario import (
    ScenarioConfig,
    evaluate_session,
    parse_approach,
    run_matrix,
    run_scenario_session,
)
from membooth.stream import JitterSpec, parse_mode
from membooth.vocab import TrainingVocabulary, extract_new_words


def parse_jitter_flag(text: str) -> JitterSpec:
    """``none``, a single max delay, or ``low:high`` in milliseconds."""
    if text == "none":
        return JitterSpec(kind="none")
    try:
        if ":" in text:
            low_s, high_s = text.split(":", 1)
            return JitterSpec(low_ms=int(low_s), high_ms=int(high_s))
        high = int(text)
        if high == 0:
            return JitterSpec(kind="none")
        return JitterSpec(high_ms=high)
    except ValueError:
        raise ConfigError(
            f"bad --jitter {text!r}; expected 'none', '<max>', or '<low>:<high>'"
        ) from None


def parse_seeds_flag(text: str) -> tuple[int, ...]:
    """``16`` means seeds 1..16; ``3,7,9`` is an explicit list."""
    try:
        if "," in text:
            return tuple(int(s) for s in text.split(",") if s.strip())
        n = int(text)
    except ValueError:
        raise ConfigError(f"bad --seeds {text!r}") from None
    if n < 1:
        raise ConfigError("--seeds count must be >= 1")
    return tuple(range(1, n + 1))


def _add_session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta", type=float, default=DEFAULT_THETA,
                   help="similarity threshold for fuzzy memory matching")
    p.add_argument("--min-chunk-ms", type=int, default=1000)
    p.add_argument("--jitter", default="0:150",
                   help="packet delay: 'none', '<max>', or '<low>:<high>' ms")
    p.add_argument("--mode", default="ship", help="ship | delay:<ms>")
    p.add_argument("--corpus", default=None, help="corpus root (default: $MEMBOOTH_CORPUS or ./corpus)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="membooth")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="list a document's out-of-vocabulary words")
    p.add_argument("--doc", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", default=None, help="output file (default: stdout)")

    p = sub.add_parser("run", help="run one scenario on one script")
    p.add_argument("--script", required=True)
    p.add_argument("--approach", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None, help="directory for run artifacts")
    _add_session_flags(p)

    p = sub.add_parser("matrix", help="run an approach grid and aggregate")
    p.add_argument("--approaches", required=True, help="comma-separated approach list")
    p.add_argument("--seeds", default="1", help="count (N -> 1..N) or comma list")
    p.add_argument("--set", dest="set_name", default="main", help="corpus set to run on")
    p.add_argument("--scripts", default=None, help="explicit comma-separated script names")
    p.add_argument("--out", default=None, help="directory for aggregate.csv and friends")
    _add_session_flags(p)

    p = sub.add_parser("serve", help="serve live sessions over TCP")
    p.add_argument("--bind", default="127.0.0.1:9763")
    p.add_argument("--corpus", default=None)
    return ap


def cmd_extract(args) -> int:
    doc = Path(args.doc)
    vocab_path = Path(args.vocab)
    if not doc.is_file():
        raise MissingCorpusInput(f"document {doc} not found")
    if not vocab_path.is_file():
        raise MissingCorpusInput(f"vocabulary {vocab_path} not found")
    words = extract_new_words(
        doc.read_text(encoding="utf-8"), TrainingVocabulary.from_file(vocab_path)
    )
    text = "\n".join(words) + ("\n" if words else "")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _scenario_from_args(args, scripts: tuple[str, ...], seeds: tuple[int, ...],
                        approach: str) -> ScenarioConfig:
    return ScenarioConfig(
        approach=approach,
        scripts=scripts,
        seeds=seeds,
        theta=args.theta,
        min_chunk_ms=args.min_chunk_ms,
        jitter=parse_jitter_flag(args.jitter),
        mode=args.mode,
    )


def cmd_run(args) -> int:
    corpus = Corpus.load(resolve_corpus_root(args.corpus))
    parse_mode(args.mode)
    parse_approach(args.approach)
    cfg = _scenario_from_args(args, (args.script,), (args.seed,), args.approach)
    item = corpus.get(args.script)
    session, _op_log = run_scenario_session(cfg, item, seed=args.seed)
    rate, dist, n_ref, report = evaluate_session(item, session)
    metrics = {"approach": cfg.label, "script": item.name, "seed": args.seed,
               "wer": rate, "mwer_distance": dist, "ref_words": n_ref}
    metrics.update(report.metrics())
    print(json.dumps(metrics, sort_keys=True))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(
            json.dumps(metrics, indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
        (out / "transcript.txt").write_text(
            session.transcript_display() + "\n", encoding="utf-8"
        )
        with (out / "segments.jsonl").open("w", encoding="utf-8") as fh:
            for line in session.segment_log_lines():
                fh.write(line + "\n")
        with (out / "decode_log.jsonl").open("w", encoding="utf-8") as fh:
            for rec in session.decode_log:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return 0


def cmd_matrix(args) -> int:
    corpus = Corpus.load(resolve_corpus_root(args.corpus))
    if args.scripts:
        scripts = tuple(s for s in args.scripts.split(",") if s)
    else:
        scripts = tuple(corpus.names(args.set_name))
    seeds = parse_seeds_flag(args.seeds)
    approaches = [a for a in args.approaches.split(",") if a]
    if not approaches:
        raise ConfigError("--approaches is empty")
    configs = [_scenario_from_args(args, scripts, seeds, a) for a in approaches]
    result = run_matrix(configs, corpus, out_dir=args.out)
    for row in result.aggregates:
        print(json.dumps(row, sort_keys=True))
    failed = result.failed()
    if failed:
        for r in failed:
            print(f"FAILED {r.config_label} {r.script} seed={r.seed}: {r.error}",
                  file=sys.stderr)
        return 1
    return 0


def cmd_serve(args) -> int:
    from membooth.service import serve

    serve(args.bind, resolve_corpus_root(args.corpus))
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {
        "extract": cmd_extract,
        "run": cmd_run,
        "matrix": cmd_matrix,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, MissingCorpusInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MemboothError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
