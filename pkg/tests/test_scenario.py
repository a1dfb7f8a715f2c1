import json

import pytest

from membooth.corpus import CorpusScript
from membooth.errors import ConfigError, MissingCorpusInput
from membooth.recognizer import RefSegment, Script, ScriptToken
from membooth.scenario import (
    APPROACHES,
    BEFORE_OCC_MARGIN_MS,
    DEFAULT_REACTION_MS,
    ScenarioConfig,
    build_initial_memory,
    parse_approach,
    run_matrix,
    run_scenario_once,
    run_scenario_session,
    seed_summary,
)
from membooth.stream import JitterSpec

NOJIT = JitterSpec(kind="none")


def make_item(tmp_path, spec, refs, name="syn"):
    """spec: list of (surface, confused_or_None, is_new); 400 ms per token."""
    tokens = []
    for i, (surface, conf, new) in enumerate(spec):
        tokens.append(ScriptToken(
            ref_surface=surface,
            start_ms=i * 400,
            end_ms=(i + 1) * 400,
            confused_form=conf if conf else surface.lower(),
            is_new_word=new,
        ))
    vocab = tmp_path / f"{name}.vocab"
    vocab.write_text("the a of to and\n", encoding="utf-8")
    return CorpusScript(
        name=name,
        script=Script(tokens=tuple(tokens), name=name),
        refs=[RefSegment(start_ms=s, end_ms=e) for s, e in refs],
        vocab_path=vocab,
    )


def cfg(approach, **kw):
    kw.setdefault("scripts", ("syn",))
    kw.setdefault("jitter", NOJIT)
    return ScenarioConfig(approach=approach, **kw)


def fill(*words):
    return [(w, None, False) for w in words]


# -- approach parsing and config -------------------------------------------

def test_parse_approach():
    assert parse_approach("oracle") == ("oracle", None)
    assert parse_approach("random_memory:500") == ("random_memory", 500)
    for bad in ("random_memory", "random_memory:x", "random_memory:-1", "psychic"):
        with pytest.raises(ConfigError):
            parse_approach(bad)


def test_config_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(approach="psychic", scripts=("s",))
    with pytest.raises(ConfigError):
        ScenarioConfig(approach="empty", scripts=())
    with pytest.raises(ConfigError):
        ScenarioConfig(approach="empty", scripts=("s",), mode="sometime")
    c = ScenarioConfig(approach="empty", scripts=("s",), name="baseline")
    assert c.label == "baseline"
    assert ScenarioConfig(approach="empty", scripts=("s",)).label == "empty"


# -- initial memory per approach -------------------------------------------

def test_reactive_approaches_start_empty(tmp_path):
    item = make_item(tmp_path, fill("a", "b"), [(0, 800)])
    for approach in ("empty", "oracle_after_occ", "oracle_ext_after_occ"):
        assert build_initial_memory(cfg(approach), item) == []


def test_oracle_adds_everything_at_zero(corpus):
    item = corpus.get("main01")
    muts = build_initial_memory(cfg("oracle"), item)
    assert muts and all(m.at_ms == 0 and m.action == "add" for m in muts)
    assert [m.surface for m in muts] == [s for s, _ in item.new_words()]


def test_before_occ_schedules_with_margin(corpus):
    item = corpus.get("main01")
    muts = build_initial_memory(cfg("oracle_before_occ"), item)
    for m, (surface, first_at) in zip(muts, item.new_words()):
        assert m.surface == surface
        assert m.at_ms == max(0, first_at - BEFORE_OCC_MARGIN_MS)


def test_ext_before_occ_includes_plant_constituents(corpus):
    item = corpus.get("main01")
    muts = build_initial_memory(cfg("oracle_ext_before_occ"), item)
    ext = [m for m in muts if m.extended]
    plain = [m for m in muts if not m.extended]
    assert len(plain) == len(item.new_words())
    assert ext and all(m.origin == "ext_precompute" and m.at_ms == 0 for m in ext)
    plant = next(p for p in corpus.manifest["plants"] if p["script"] == "main01")
    ext_surfaces = {m.surface.lower() for m in ext}
    assert plant["w1"].lower() in ext_surfaces
    assert plant["w2"].lower() in ext_surfaces


def test_alias_memory_loads_tsv(corpus):
    item = corpus.get("alias01")
    muts = build_initial_memory(cfg("alias_memory"), item)
    assert muts and all(m.at_ms == 0 for m in muts)
    assert any(m.aliases for m in muts)
    with pytest.raises(MissingCorpusInput):
        build_initial_memory(cfg("alias_memory"), corpus.get("main01"))


def test_curr_slides_schedule_adds_and_removes(corpus):
    item = corpus.get("main01")
    muts = build_initial_memory(cfg("source_curr_slides"), item)
    actions = {m.action for m in muts}
    assert actions == {"add", "remove"}
    assert all(m.origin == "slide_window" for m in muts)
    assert [m.at_ms for m in muts] == sorted(m.at_ms for m in muts)
    with pytest.raises(MissingCorpusInput):
        build_initial_memory(cfg("source_curr_slides"), corpus.get("alias01"))


def test_random_memory_sampling(corpus):
    item = corpus.get("demo01")
    assert build_initial_memory(cfg("random_memory:0"), item, seed=1) == []
    a = build_initial_memory(cfg("random_memory:30"), item, seed=1)
    b = build_initial_memory(cfg("random_memory:30"), item, seed=1)
    c = build_initial_memory(cfg("random_memory:30"), item, seed=2)
    assert [m.surface for m in a] == [m.surface for m in b]
    assert [m.surface for m in a] != [m.surface for m in c]
    script_words = {t.ref_normalized for t in item.script.tokens}
    assert all(m.surface not in script_words for m in a)
    with pytest.raises(ConfigError):
        build_initial_memory(cfg("random_memory:100000"), item, seed=1)


# -- reactive operator: miss path ------------------------------------------

@pytest.fixture
def twice_item(tmp_path):
    spec = (
        fill("a", "b", "c")
        + [("NeoGraph", "neograf", True)]
        + fill("d", "e", "f", "g", "h", "i", "j", "k", "l", "m")
        + [("NeoGraph", "neograf", True)]
        + fill("n")
    )
    return make_item(tmp_path, spec, [(0, 6400)])


def test_operator_adds_after_miss_and_second_occurrence_hits(twice_item):
    session, log = run_scenario_session(cfg("oracle_after_occ"), twice_item, seed=0)
    assert len(log) == 1
    entry = log[0]
    assert entry["trigger"] == "miss" and entry["surface"] == "NeoGraph"
    trigger_seg = next(e for e in session.events_list if e.kind == "segment"
                       and e.payload.segment_id == entry["segment_id"])
    assert entry["at_ms"] == trigger_seg.at_ms + DEFAULT_REACTION_MS
    # second occurrence is rewritten from memory: one TP, one FN
    result = run_scenario_once(cfg("oracle_after_occ"), twice_item, seed=0)
    assert (result.report.tp, result.report.fn) == (1, 1)
    assert result.report.recall == pytest.approx(0.5)


def test_empty_baseline_misses_both(twice_item):
    result = run_scenario_once(cfg("empty"), twice_item, seed=0)
    assert result.operator_log == []
    assert (result.report.tp, result.report.fn) == (0, 2)
    assert result.report.recall == 0.0 and result.report.f1 == 0.0


def test_operator_injection_carries_origin(twice_item):
    session, _log = run_scenario_session(cfg("oracle_after_occ"), twice_item, seed=0)
    origins = [e.payload["mutation"]["origin"] for e in session.events_list
               if e.kind == "memory"]
    assert origins == ["operator_miss"]


def test_legit_hit_never_triggers_false_positive_policy(twice_item):
    result = run_scenario_once(cfg("oracle_ext_after_occ"), twice_item, seed=0)
    assert [e["trigger"] for e in result.operator_log] == ["miss"]
    assert (result.report.tp, result.report.fn) == (1, 1)


# -- reactive operator: false-positive path --------------------------------

@pytest.fixture
def plant_item(tmp_path):
    spec = (
        fill("a", "b", "c", "d")
        + [("Goodlose", "goodloze", True)]
        + fill("e", "f", "g", "h", "i")
        + fill("good", "lose")
        + fill("j", "k", "l", "m", "n")
        + fill("good", "lose")
        + fill("o")
    )
    return make_item(tmp_path, spec, [(0, 3000), (3000, 6000), (6000, 8000)])


def test_false_positive_triggers_extended_adds(plant_item):
    result = run_scenario_once(cfg("oracle_ext_after_occ"), plant_item, seed=0)
    triggers = [e["trigger"] for e in result.operator_log]
    assert triggers == ["miss", "false_positive", "false_positive"]
    fp_entries = result.operator_log[1:]
    assert {e["surface"] for e in fp_entries} == {"good", "lose"}
    assert all(e["entry"] == "goodlose" for e in fp_entries)
    # first confusable pair got rewritten before the fix, second was vetoed
    assert result.report.fp == 1


def test_plain_agent_keeps_rewriting_confusables(plant_item):
    result = run_scenario_once(cfg("oracle_after_occ"), plant_item, seed=0)
    assert [e["trigger"] for e in result.operator_log] == ["miss"]
    assert result.report.fp == 2


def test_extended_policy_never_raises_fp(plant_item):
    plain = run_scenario_once(cfg("oracle_after_occ"), plant_item, seed=0)
    ext = run_scenario_once(cfg("oracle_ext_after_occ"), plant_item, seed=0)
    assert ext.report.fp <= plain.report.fp


# -- evaluation plumbing ---------------------------------------------------

def test_oracle_on_demo_script(corpus):
    result = run_scenario_once(cfg("oracle", scripts=("demo01",)),
                               corpus.get("demo01"), seed=1)
    # the far confusion stays out of reach without an alias
    assert (result.report.tp, result.report.fn) == (1, 1)
    assert result.report.recall == pytest.approx(0.5)
    assert result.error is None


def test_alias_memory_recovers_far_confusion(corpus):
    result = run_scenario_once(cfg("alias_memory", scripts=("demo01",)),
                               corpus.get("demo01"), seed=1)
    assert result.report.recall == 1.0


def test_seed_summary_pools_counts(tmp_path):
    item = make_item(tmp_path, fill("a", "b"), [(0, 800)])
    a = run_scenario_once(cfg("empty"), item, seed=0)
    b = run_scenario_once(cfg("empty"), item, seed=0)
    summary = seed_summary([a, b])
    assert summary["wer"] == pytest.approx(
        (a.mwer_distance + b.mwer_distance) / (a.ref_words + b.ref_words))
    assert set(summary) == {"wer", "f1", "recall", "precision",
                            "casing_accuracy", "fp"}


# -- matrix ----------------------------------------------------------------

def test_matrix_marks_failed_cells(corpus):
    config = ScenarioConfig(approach="source_curr_slides", scripts=("alias01",),
                            jitter=NOJIT)
    result = run_matrix([config], corpus)
    assert len(result.runs) == 1
    assert result.failed() == result.runs
    assert "MissingCorpusInput" in result.runs[0].error
    row = result.aggregates[0]
    assert row["n_runs"] == 0 and row["n_failed"] == 1
    assert "wer_mean" not in row


def test_matrix_aggregates_and_curve(corpus, tmp_path):
    configs = [
        ScenarioConfig(approach="empty", scripts=("demo01",), seeds=(1, 2),
                       jitter=NOJIT),
        ScenarioConfig(approach="random_memory:0", scripts=("demo01",),
                       seeds=(1, 2), jitter=NOJIT),
        ScenarioConfig(approach="random_memory:30", scripts=("demo01",),
                       seeds=(1, 2), jitter=NOJIT),
    ]
    result = run_matrix(configs, corpus, out_dir=tmp_path)
    assert [c["k"] for c in result.curve] == [0, 30]
    empty_row = next(r for r in result.aggregates if r["approach"] == "empty")
    zero_row = next(r for r in result.aggregates
                    if r["approach"] == "random_memory:0")
    assert zero_row["wer_mean"] == empty_row["wer_mean"]
    assert empty_row["n_runs"] == 2 and empty_row["n_failed"] == 0

    assert (tmp_path / "aggregate.csv").read_text().startswith("approach,")
    lines = (tmp_path / "runs.jsonl").read_text().splitlines()
    assert len(lines) == 6
    row = json.loads(lines[0])
    assert {"approach", "script", "seed", "wer", "f1"} <= set(row)
    curve = json.loads((tmp_path / "wer_curve.json").read_text())
    assert [c["k"] for c in curve] == [0, 30]
