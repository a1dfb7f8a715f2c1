import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from membooth.casing import (
    GAP_PERIOD_MS,
    apply_casing,
    case_and_punctuate,
    load_uppercase_lexicon,
    punctuate,
    render_text,
)
from membooth.errors import DanglingProvenance
from membooth.matching import PLAIN, DecodedToken, Provenance
from membooth.memory import MemoryStore
from membooth.textnorm import normalize_token


def plain(text, start=0, end=100):
    return DecodedToken(text=text, start_ms=start, end_ms=end)

def hit(text, entry, start=0, end=100):
    return DecodedToken(
        text=text, start_ms=start, end_ms=end,
        provenance=Provenance(kind="memory_hit", entry_normalized=entry),
    )


def test_sentence_initial_capitalisation():
    out = apply_casing([plain("hello"), plain("world")], {})
    assert [t.text for t in out] == ["Hello", "world"]
    assert all(t.source == "rule" for t in out)


def test_sentence_initial_flag_off():
    out = apply_casing([plain("hello")], {}, sentence_initial=False)
    assert out[0].text == "hello"


def test_memory_surface_verbatim_even_sentence_initial():
    store = MemoryStore()
    store.add_entry("iAnnotate")
    out = apply_casing([hit("iannotate", "iannotate"), plain("rocks")], store.snapshot())
    assert [t.text for t in out] == ["iAnnotate", "rocks"]
    assert out[0].source == "memory" and out[1].source == "rule"


def test_plain_directory_source():
    out = apply_casing([hit("dfki", "dfki")], {"dfki": "DFKI"})
    assert out[0].text == "DFKI"


def test_multi_word_surface_spreads_over_run():
    toks = [hit("neo", "neo graph", 0, 50), hit("graph", "neo graph", 50, 100)]
    out = apply_casing(toks, {"neo graph": "Neo Graph"})
    assert [t.text for t in out] == ["Neo", "Graph"]


def test_run_resets_between_entries():
    toks = [
        hit("neo", "neo graph"), hit("graph", "neo graph"),
        plain("and"),
        hit("neo", "neo graph"), hit("graph", "neo graph"),
    ]
    out = apply_casing(toks, {"neo graph": "Neo Graph"})
    assert [t.text for t in out] == ["Neo", "Graph", "and", "Neo", "Graph"]


def test_dangling_provenance():
    with pytest.raises(DanglingProvenance):
        apply_casing([hit("ghost", "ghost")], {})
    store = MemoryStore()
    with pytest.raises(DanglingProvenance):
        apply_casing([hit("ghost", "ghost")], store.snapshot())


def test_uppercase_lexicon(tmp_path):
    lex_file = tmp_path / "upper.txt"
    lex_file.write_text("nlp\nMQM\n", encoding="utf-8")
    lex = load_uppercase_lexicon(lex_file)
    assert lex == frozenset({"nlp", "mqm"})
    out = apply_casing([plain("nlp"), plain("mqm")], {}, uppercase_lexicon=lex)
    assert [t.text for t in out] == ["NLP", "MQM"]


def test_punctuate_inserts_period_at_long_gap():
    cased = apply_casing([plain("one"), plain("two"), plain("three")], {})
    out = punctuate(cased, [GAP_PERIOD_MS, GAP_PERIOD_MS - 1], end_of_session=False)
    assert [t.trailing_punct for t in out] == ["period", "none", "none"]
    # token after the period is re-cased
    assert [t.text for t in out] == ["One", "Two", "three"]


def test_punctuate_never_recases_memory_tokens():
    toks = [plain("see", 0, 100), hit("iannotate", "iannotate", 900, 1000)]
    out = case_and_punctuate(toks, {"iannotate": "iAnnotate"})
    assert [t.text for t in out] == ["See", "iAnnotate"]
    assert out[0].trailing_punct == "period"  # 800 ms gap


def test_end_of_session_period():
    cased = apply_casing([plain("bye")], {})
    assert punctuate(cased, [])[-1].trailing_punct == "period"
    assert punctuate(cased, [], end_of_session=False)[-1].trailing_punct == "none"


def test_negative_gap_rejected():
    cased = apply_casing([plain("a"), plain("b")], {})
    with pytest.raises(ValueError):
        punctuate(cased, [-1])


def test_render_text():
    toks = [plain("hello", 0, 100), plain("world", 150, 300), plain("again", 1100, 1200)]
    text = render_text(case_and_punctuate(toks, {}))
    assert text == "Hello world. Again."


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.text(alphabet="abcxyz", min_size=1, max_size=6), min_size=1, max_size=8),
    st.booleans(),
)
def test_rule_casing_preserves_normalized_form(words, initial):
    toks = [plain(w, i * 100, i * 100 + 80) for i, w in enumerate(words)]
    out = apply_casing(toks, {}, sentence_initial=initial,
                       uppercase_lexicon=frozenset({"xyz"}))
    assert len(out) == len(toks)
    for before, after in zip(toks, out):
        assert normalize_token(after.text) == normalize_token(before.text)
