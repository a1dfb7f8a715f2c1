import filecmp
from pathlib import Path

import pytest

from membooth.corpus_gen import MASTER_SEED, generate_corpus


def tree(root: Path) -> dict:
    return {p.relative_to(root): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def fresh(tmp_path_factory):
    root = tmp_path_factory.mktemp("gen_a")
    generate_corpus(root)
    return root


def test_generation_is_deterministic(fresh, tmp_path_factory):
    other = tmp_path_factory.mktemp("gen_b")
    generate_corpus(other)
    a, b = tree(fresh), tree(other)
    assert set(a) == set(b)
    assert all(a[k] == b[k] for k in a)


def test_committed_corpus_matches_generator(fresh):
    committed = Path("corpus")
    a, b = tree(fresh), tree(committed)
    assert set(a) == set(b), "committed corpus layout drifted"
    diff = [k for k in a if a[k] != b[k]]
    assert not diff, f"committed corpus contents drifted: {diff[:5]}"


def test_different_seed_changes_content(fresh, tmp_path_factory):
    other = tmp_path_factory.mktemp("gen_seeded")
    generate_corpus(other, seed=MASTER_SEED + 1)
    a, b = tree(fresh), tree(other)
    assert any(a[k] != b.get(k) for k in a if k.suffix == ".tsv")


def test_corpus_shape(corpus):
    manifest = corpus.manifest
    sets = manifest["sets"]
    assert len(sets["main"]) == 10
    assert len(sets["alias"]) == 2
    assert sets["dense"] and sets["rehm"]

    new_words = manifest["new_words"]
    surfaces = {w["surface"] for w in new_words}
    assert len(new_words) == 48 and len(surfaces) >= 40
    counts = sorted(w["count"] for w in new_words)
    assert counts.count(1) == 16 and counts.count(2) == 16 and counts.count(3) == 16
    assert sum(1 for w in new_words if w["count"] >= 2) >= len(new_words) / 2

    plants = manifest["plants"]
    assert len(plants) == 10
    assert {p["script"] for p in plants} == set(sets["main"])
    for p in plants:
        assert p["concat"].startswith(p["w1"]) and p["concat"].endswith(p["w2"])


def test_scripts_load_and_validate(corpus):
    for name in corpus.manifest["sets"]["main"]:
        item = corpus.get(name)
        script_new = {t.ref_normalized for t in item.script.tokens if t.is_new_word}
        declared = {w["surface"].lower() for w in corpus.manifest["new_words"]
                    if w["script"] == name}
        plant = next(p for p in corpus.manifest["plants"] if p["script"] == name)
        assert script_new == declared | {plant["concat"]}
        assert item.refs and item.doc_path is not None


def test_every_main_new_word_count_matches_script(corpus):
    per_script: dict = {}
    for w in corpus.manifest["new_words"]:
        per_script.setdefault(w["script"], {})[w["surface"].lower()] = w["count"]
    for name, want in per_script.items():
        toks = corpus.get(name).script.tokens
        for surface, count in want.items():
            got = sum(1 for t in toks if t.ref_normalized == surface)
            assert got == count, (name, surface)
