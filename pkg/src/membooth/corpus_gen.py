"""Deterministic synthetic-corpus generator.

Builds the bundled corpus: ten main talks with authored confusions and one
planted confusable phrase each, two alias talks whose confusions are too far
for fuzzy matching, one neighbor-dense talk for the large-random-memory
sweep, one extraction fixture, and a small demo talk. Every artifact is a
pure function of the seed; regenerate with ``python -m membooth.corpus_gen``.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

from membooth.matching import Matcher, similarity
from membooth.memory import MemoryStore, save_memory_file
from membooth.recognizer import (
    RefSegment,
    Script,
    ScriptToken,
    recognize_chunk,
    save_ref_segments,
    save_script,
)
from membooth.textnorm import normalize_token
from membooth.vocab import extract_new_words, TrainingVocabulary

MASTER_SEED = 20260823
THETA = 0.75
SENTENCE_GAP_MS = 800
MIN_REPEAT_SPACING_MS = 25_000

FILLERS = """
the a an and or but so then now here there this that these those it its they
we you he she one two few many most all some any other same new old good
long short high low early late big small own right left next last first per
time year day week part case point place work life world hand eye side area
task talk team tool line word name form list page note plan goal idea topic
level order group stage phase model thing value result detail review system
change update session meeting project process problem question answer reason
example section content context summary number record report status source
member leader person people speaker manager engineer student expert service
office market company product feature release version quality support design
research science method theory practice training testing learning reading
writing speaking hearing meaning setting opening closing starting ending
running working moving making taking giving getting holding keeping turning
showing telling asking calling helping playing building growing leading
be is are was were been being have has had do does did can could may might
will would shall should must need want know think see say get make go come
take find give use tell ask seem feel try leave call keep let begin help
show hear play run move like live believe hold bring happen write provide
sit stand lose pay meet include continue set learn lead understand watch
follow stop create speak read allow add spend grow open walk win offer
remember love consider appear buy wait serve die send expect build stay
fall cut reach kill remain suggest raise pass sell require report decide
pull not very also just still only even back much where when how why what
who which while after before during between under over about against from
with into onto upon within without across along around behind beyond near
""".split()

RESERVED = {
    "pipelining", "friem", "iannotate", "mqm", "lsps", "eservices",
    "semantification", "aljoscha", "cortana", "workflows", "dfki",
    "annotating", "nlp",
}

REHM_WORDS = [
    "pipelining", "Friem", "iAnnotate", "MQM", "LSPs", "eServices",
    "semantification", "Aljoscha", "Cortana", "workflows", "DFKI",
    "annotating", "NLP",
]

_SYLLABLES = ["ba", "do", "ki", "mu", "ra", "ve", "zo", "lin", "tor", "pex",
              "gan", "sul", "mir", "fen", "cra", "dol", "nis", "vab", "tum", "rok"]
_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class GenError(RuntimeError):
    pass


def _edit1(word: str, rng: random.Random) -> str:
    ops = ["sub", "swap"] + (["del"] if len(word) >= 5 else []) + ["ins"]
    op = rng.choice(ops)
    i = rng.randrange(len(word))
    if op == "sub":
        c = rng.choice(_LETTERS)
        while c == word[i]:
            c = rng.choice(_LETTERS)
        return word[:i] + c + word[i + 1 :]
    if op == "del":
        return word[:i] + word[i + 1 :]
    if op == "ins":
        return word[:i] + rng.choice(_LETTERS) + word[i:]
    if i + 1 < len(word) and word[i] != word[i + 1]:
        return word[:i] + word[i + 1] + word[i] + word[i + 2 :]
    return _edit1(word, rng)


def _duration(word: str) -> int:
    return max(280, min(720, 240 + 34 * len(word)))


def _new_name(kind: str, rng: random.Random, taken: set) -> str:
    for _ in range(200):
        if kind == "acronym":
            n = rng.randint(4, 5)
            surf = "".join(rng.choice(_LETTERS) for _ in range(n)).upper()
        elif kind == "camel":
            a, b = rng.sample(_SYLLABLES, 2), rng.sample(_SYLLABLES, 2)
            surf = ("".join(a)).capitalize() + ("".join(b)).capitalize()
        elif kind == "proper":
            parts = rng.sample(_SYLLABLES, rng.randint(2, 3))
            surf = "".join(parts).capitalize()
        else:  # techy
            surf = "".join(rng.sample(_SYLLABLES, rng.randint(2, 3))) + rng.choice(
                ["izer", "atron", "ics", "ify", "ology"]
            )
        norm = normalize_token(surf)
        if (
            4 <= len(norm) <= 14
            and norm not in taken
            and norm not in RESERVED
            and norm not in FILLERS
        ):
            taken.add(norm)
            return surf
    raise GenError(f"could not mint a fresh {kind} name")


def _fuzzy_confusion(norm: str, rng: random.Random, avoid: set) -> str:
    """A 1-2 edit corruption still within theta of the word."""
    for _ in range(300):
        conf = _edit1(norm, rng)
        if len(norm) >= 9 and rng.random() < 0.4:
            conf = _edit1(conf, rng)
        if conf == norm or conf in avoid or conf in FILLERS:
            continue
        if similarity(conf, norm) >= THETA and normalize_token(conf) == conf:
            return conf
    raise GenError(f"no fuzzy confusion found for {norm!r}")


def _far_confusion(norm: str, rng: random.Random) -> str:
    """A multi-token mangle every window of which stays below theta."""
    for _ in range(300):
        n_parts = rng.randint(2, 3)
        cuts = sorted(rng.sample(range(2, max(3, len(norm) - 1)), min(n_parts - 1, len(norm) - 3)))
        parts = []
        prev = 0
        for c in cuts + [len(norm)]:
            parts.append(norm[prev:c])
            prev = c
        parts = [p for p in parts if p]
        mangled = []
        for p in parts:
            q = _edit1(p, rng) if len(p) >= 3 else p + rng.choice("aeiou")
            mangled.append(q if q else p)
        phrase = " ".join(mangled)
        ok = all(
            similarity(" ".join(mangled[i:j]), norm) < THETA
            for i in range(len(mangled))
            for j in range(i + 1, len(mangled) + 1)
        )
        if ok and normalize_token(phrase.replace(" ", "")) and len(mangled) >= 2:
            return phrase
    raise GenError(f"no far confusion found for {norm!r}")


class SentencePlan:
    """One sentence: parallel ref surfaces and confused forms."""

    def __init__(self, surfaces: list[str], confusions: list[str], flags: list[bool]):
        self.surfaces = surfaces
        self.confusions = confusions
        self.flags = flags  # is_new_word per token


def _base_sentence(rng: random.Random, length: int) -> SentencePlan:
    words = [rng.choice(FILLERS) for _ in range(length)]
    return SentencePlan(list(words), list(words), [False] * length)


def _script_from_sentences(name: str, sentences: list[SentencePlan]) -> tuple[Script, list[RefSegment]]:
    tokens = []
    t = 0
    sentence_spans = []
    for sp in sentences:
        s_start = t
        for surf, conf, flag in zip(sp.surfaces, sp.confusions, sp.flags):
            d = _duration(normalize_token(surf))
            tokens.append(
                ScriptToken(
                    ref_surface=surf,
                    start_ms=t,
                    end_ms=t + d,
                    confused_form=conf,
                    is_new_word=flag,
                )
            )
            t += d
        sentence_spans.append((s_start, t))
        t += SENTENCE_GAP_MS
    script = Script(tokens=tuple(tokens), name=name)
    refs = []
    group = 4
    for i in range(0, len(sentence_spans), group):
        chunk = sentence_spans[i : i + group]
        refs.append(RefSegment(start_ms=chunk[0][0], end_ms=chunk[-1][1]))
    return script, refs


def _scan_matches(script: Script, entries: list[tuple[str, tuple, bool]], theta=THETA):
    """Full-script match scan against a memory built from ``entries``."""
    store = MemoryStore()
    for surface, aliases, extended in entries:
        store.add_entry(surface, aliases=aliases, extended=extended)
    top = recognize_chunk(list(script.tokens), 1, 0).top
    matcher = Matcher(theta=theta)
    return top, matcher.match(top, store.snapshot())


def _prose(words: list[str], rng: random.Random, per_sentence=(7, 12), protect=()) -> str:
    protected = {normalize_token(w) for w in protect}
    out = []
    i = 0
    while i < len(words):
        n = rng.randint(*per_sentence)
        chunk = words[i : i + n]
        i += n
        if not chunk:
            break
        if normalize_token(chunk[0]) in protected:
            chunk.insert(0, "the")
        first = chunk[0]
        if first.islower():
            first = first.capitalize()
        out.append(" ".join([first] + chunk[1:]) + ".")
    return " ".join(out)


# --------------------------------------------------------------------------
# main talks


def _gen_main_scripts(rng: random.Random, taken: set):
    """Ten talks sharing a 48-word new-vocabulary with a 16/16/16 count split."""
    counts_pool = [1] * 16 + [2] * 16 + [3] * 16
    while True:
        rng.shuffle(counts_pool)
        groups = [counts_pool[i * 5 : i * 5 + 5] for i in range(8)]
        groups += [counts_pool[40:44], counts_pool[44:48]]
        if all(max(g) >= 2 for g in groups):
            break
    scripts = []
    word_table = []  # (script, surface, count) for the manifest sanity block
    for s_idx, counts in enumerate(groups):
        name = f"main{s_idx + 1:02d}"
        for attempt in range(30):
            try:
                scripts.append(_gen_one_main(rng, name, counts, taken, word_table))
                break
            except GenError:
                word_table[:] = [r for r in word_table if r["script"] != name]
        else:
            raise GenError(f"{name}: generation kept failing")
    return scripts, word_table


def _gen_one_main(rng: random.Random, name: str, counts: list[int], taken: set, word_table):
    n_sentences = 64
    kinds = ["acronym", "camel", "techy", "proper"]

    # one planted confusable: two fillers whose concatenation is the new word
    for _ in range(200):
        w1, w2 = rng.choice(FILLERS), rng.choice(FILLERS)
        concat = w1 + w2
        if (
            4 <= len(w1) <= 6
            and 4 <= len(w2) <= 6
            and concat not in taken
            and concat not in FILLERS
            and concat not in RESERVED
        ):
            break
    else:
        raise GenError("no plant pair found")
    taken.add(concat)

    words = []  # (surface, normalized, count, confusion)
    concat_idx = counts.index(max(counts))
    avoid = set(taken)
    for i, count in enumerate(counts):
        if i == concat_idx:
            surf, norm = concat, concat
        else:
            surf = _new_name(kinds[i % len(kinds)], rng, taken)
            norm = normalize_token(surf)
        conf = _fuzzy_confusion(norm, rng, avoid)
        avoid.add(conf)
        words.append((surf, norm, count, conf))
        word_table.append({"script": name, "surface": surf, "count": count})

    sentences = [
        _base_sentence(rng, rng.randint(8, 13)) for _ in range(n_sentences)
    ]

    # schedule occurrences: per word, sentences spaced >= 6 apart
    used_sentences: set[int] = set()

    def pick_slots(k: int, lo: int, hi_first: int | None = None) -> list[int]:
        for _ in range(500):
            slots = sorted(rng.sample(range(lo, n_sentences), k))
            if hi_first is not None and slots[0] > hi_first:
                continue
            if all(b - a >= 6 for a, b in zip(slots, slots[1:])) and not (
                set(slots) & used_sentences
            ):
                used_sentences.update(slots)
                return slots
        raise GenError("could not space occurrences")

    first_occ_sentence = {}
    order = sorted(range(len(words)), key=lambda i: i != concat_idx)
    for w_i in order:
        surf, norm, count, conf = words[w_i]
        slots = pick_slots(count, 1, hi_first=6 if w_i == concat_idx else None)
        first_occ_sentence[norm] = slots[0]
        for s in slots:
            sp = sentences[s]
            pos_in = rng.randint(1, len(sp.surfaces) - 1)
            sp.surfaces[pos_in] = surf
            sp.confusions[pos_in] = conf
            sp.flags[pos_in] = True

    # plants: the common bigram, three times, after the concat word's first slot
    plant_slots = pick_slots(3, first_occ_sentence[concat] + 7)
    for s in plant_slots:
        sp = sentences[s]
        pos_in = rng.randint(1, len(sp.surfaces) - 2)
        sp.surfaces[pos_in : pos_in + 2] = [w1, w2]
        sp.confusions[pos_in : pos_in + 2] = [w1, w2]
        sp.flags[pos_in : pos_in + 2] = [False, False]

    # ~2% background noise on plain fillers
    for sp in sentences:
        for i in range(len(sp.surfaces)):
            if sp.flags[i] or sp.confusions[i] != sp.surfaces[i]:
                continue
            if rng.random() < 0.02 and len(sp.surfaces[i]) >= 4:
                corrupted = _edit1(sp.surfaces[i], rng)
                if all(similarity(corrupted, n) < THETA for _, n, _, _ in words):
                    sp.confusions[i] = corrupted

    script, refs = _script_from_sentences(name, sentences)

    # source document: 80% of the new words + two decoys, in filler prose
    doc_words = [w[0] for w in words[: max(1, round(len(words) * 0.8))]]
    decoys = [_new_name("proper", rng, taken) for _ in range(2)]
    body = [rng.choice(FILLERS) for _ in range(120)]
    for w in doc_words + decoys:
        body.insert(rng.randrange(20, len(body)), w)
    doc = _prose(body, rng, protect=doc_words + decoys)

    _validate_main(name, script, words, plant=(w1, w2, concat), decoys=decoys)
    return {
        "name": name,
        "script": script,
        "refs": refs,
        "doc": doc,
        "words": words,
        "plant": {"script": name, "w1": w1, "w2": w2, "concat": concat},
        "decoys": decoys,
    }


def _validate_main(name, script: Script, words, plant, decoys):
    w1, w2, concat = plant
    by_norm = {n: (surf, count) for surf, n, count, _ in words}
    occ: dict[str, list[int]] = {}
    prev_surface: dict[str, str] = {}
    for i, t in enumerate(script.tokens):
        if t.is_new_word:
            norm = t.ref_normalized
            if norm not in by_norm:
                raise GenError(f"{name}: stray new-word flag on {t.ref_surface!r}")
            if prev_surface.setdefault(norm, t.ref_surface) != t.ref_surface:
                raise GenError(f"{name}: inconsistent casing for {norm}")
            occ.setdefault(norm, []).append(t.start_ms)
            if i == 0 or script.tokens[i - 1].end_ms != t.start_ms:
                raise GenError(f"{name}: sentence-initial new word {t.ref_surface!r}")
    for norm, (surf, count) in by_norm.items():
        starts = occ.get(norm, [])
        if len(starts) != count:
            raise GenError(f"{name}: {norm} has {len(starts)} occurrences, wanted {count}")
        if any(b - a < MIN_REPEAT_SPACING_MS for a, b in zip(starts, starts[1:])):
            raise GenError(f"{name}: occurrences of {norm} too close")

    # full-script scan with the oracle memory: matches must be exactly the
    # authored occurrences plus the three plants, nothing else
    entries = [(surf, (), False) for surf, _, _, _ in words]
    top, matches = _scan_matches(script, entries)
    expected = sum(c for _, _, c, _ in words) + 3
    if len(matches) != expected:
        raise GenError(
            f"{name}: oracle scan found {len(matches)} matches, wanted {expected}: "
            + str([(m.entry_normalized, m.window_text) for m in matches])
        )
    plant_hits = [m for m in matches if m.window_text == f"{w1} {w2}"]
    if len(plant_hits) != 3:
        raise GenError(f"{name}: {len(plant_hits)} plant hits, wanted 3")

    # decoy entries must not touch anything
    _, decoy_matches = _scan_matches(script, [(d, (), False) for d in decoys])
    if decoy_matches:
        raise GenError(f"{name}: decoy matched: {decoy_matches}")


# --------------------------------------------------------------------------
# alias talks


def _gen_alias_script(rng: random.Random, name: str, taken: set):
    n_words = 6
    words = []
    for i in range(n_words):
        surf = _new_name(["proper", "camel", "techy"][i % 3], rng, taken)
        norm = normalize_token(surf)
        if len(norm) < 7:
            surf += "on"
            norm = normalize_token(surf)
            taken.add(norm)
        conf = _far_confusion(norm, rng)
        words.append((surf, norm, 2, conf))
    sentences = [_base_sentence(rng, rng.randint(8, 12)) for _ in range(40)]
    used: set[int] = set()
    for surf, norm, count, conf in words:
        for _ in range(500):
            slots = sorted(rng.sample(range(1, 40), count))
            if all(b - a >= 6 for a, b in zip(slots, slots[1:])) and not set(slots) & used:
                used.update(slots)
                break
        else:
            raise GenError("alias spacing failed")
        conf_parts = conf.split()
        for s in slots:
            sp = sentences[s]
            pos_in = rng.randint(1, len(sp.surfaces) - 1)
            sp.surfaces[pos_in] = surf
            sp.confusions[pos_in] = conf
            sp.flags[pos_in] = True
    script, refs = _script_from_sentences(name, sentences)

    entries_plain = [(surf, (), False) for surf, _, _, _ in words]
    _, plain_matches = _scan_matches(script, entries_plain)
    if plain_matches:
        raise GenError(f"{name}: far confusions matched without aliases: {plain_matches}")
    entries_alias = [(surf, (conf,), False) for surf, _, _, conf in words]
    _, alias_matches = _scan_matches(script, entries_alias)
    want = sum(c for _, _, c, _ in words)
    if len(alias_matches) != want or not all(m.via_alias for m in alias_matches):
        raise GenError(f"{name}: alias scan found {len(alias_matches)}, wanted {want}")
    return {"name": name, "script": script, "refs": refs, "words": words}


# --------------------------------------------------------------------------
# dense talk for the random-memory sweep


def _gen_dense(rng: random.Random, taken: set):
    consonants = "bcdfglmnprst"
    vowels = "aeiou"
    bases = []
    seen = set(FILLERS) | taken
    while len(bases) < 120:
        w = "".join(
            rng.choice(consonants) if i % 2 == 0 else rng.choice(vowels) for i in range(5)
        )
        if w not in seen:
            seen.add(w)
            bases.append(w)

    danger = []
    for b in bases:
        minted = 0
        for _ in range(50):
            if minted >= 2:
                break
            i = rng.randrange(5)
            alphabet = consonants if i % 2 == 0 else vowels
            c = rng.choice(alphabet)
            if c == b[i]:
                continue
            n = b[:i] + c + b[i + 1 :]
            if n not in seen:
                seen.add(n)
                danger.append(n)
                minted += 1
        if minted < 2:
            raise GenError(f"dense: not enough neighbors for {b}")

    filler_alpha = "jqwxyzkhv"
    extras = []
    while len(extras) < 30_000 - len(danger):
        n = rng.randint(9, 11)
        w = "".join(
            rng.choice(filler_alpha) if i % 2 == 0 else rng.choice(vowels) for i in range(n)
        )
        if w not in seen:
            seen.add(w)
            extras.append(w)

    vocab_words = danger + extras
    rng.shuffle(vocab_words)

    sentences = []
    for _ in range(66):
        length = rng.randint(5, 7)
        sentences.append(
            SentencePlan(*(lambda ws: (list(ws), list(ws), [False] * len(ws)))(
                [rng.choice(bases) for _ in range(length)]
            ))
        )
    script, refs = _script_from_sentences("dense01", sentences)
    return {"name": "dense01", "script": script, "refs": refs, "vocab": vocab_words}


# --------------------------------------------------------------------------
# extraction fixture and demo


def _gen_rehm(rng: random.Random):
    glue = [rng.choice(FILLERS) for _ in range(180)]
    body = list(glue[:12])
    rest = glue[12:]
    step = len(rest) // len(REHM_WORDS)
    for i, w in enumerate(REHM_WORDS):
        body.extend(rest[i * step : (i + 1) * step])
        body.append(w)
    body.extend(rest[len(REHM_WORDS) * step :])
    doc = _prose(body, rng, protect=REHM_WORDS)
    vocab = sorted(
        {normalize_token(w) for w in doc.split()}
        - {normalize_token(w) for w in REHM_WORDS}
        - {""}
    )

    words = []
    for surf in REHM_WORDS:
        norm = normalize_token(surf)
        conf = norm if len(norm) <= 3 else _fuzzy_confusion(norm, rng, set())
        words.append((surf, norm, 1, conf))
    sentences = [_base_sentence(rng, rng.randint(8, 12)) for _ in range(30)]
    order = sorted(rng.sample(range(1, 30), len(words)))
    for (surf, norm, _c, conf), s in zip(words, order):
        sp = sentences[s]
        pos_in = rng.randint(1, len(sp.surfaces) - 1)
        sp.surfaces[pos_in] = surf
        sp.confusions[pos_in] = conf
        sp.flags[pos_in] = True
    script, refs = _script_from_sentences("rehm01", sentences)
    return {
        "name": "rehm01",
        "script": script,
        "refs": refs,
        "doc": doc,
        "vocab": vocab,
        "words": words,
    }


def _gen_demo(rng: random.Random):
    sentences = [
        SentencePlan(*cols)
        for cols in [
            (
                ["today", "we", "visit", "the", "NeoGraph", "lab", "together"],
                ["today", "we", "visit", "the", "neo graf", "lab", "together"],
                [False, False, False, False, True, False, False],
            ),
            (
                ["the", "team", "builds", "small", "tools", "for", "speech", "work"],
                ["the", "team", "builds", "small", "tools", "for", "speech", "work"],
                [False] * 8,
            ),
            (
                ["many", "people", "use", "NeoGraph", "every", "day", "now"],
                ["many", "people", "use", "neograf", "every", "day", "now"],
                [False, False, False, True, False, False, False],
            ),
        ]
    ]
    script, refs = _script_from_sentences("demo01", sentences)
    return {"name": "demo01", "script": script, "refs": refs,
            "words": [("NeoGraph", "neograph", 2, "neo graf")]}


# --------------------------------------------------------------------------
# slide schedules (main01 only)


def _write_slides(root: Path, item, rng: random.Random) -> str:
    script: Script = item["script"]
    end = script.end_ms
    n_slides = 4
    bounds = [round(end * i / n_slides) for i in range(n_slides + 1)]
    slide_dir = root / "slides" / item["name"]
    slide_dir.mkdir(parents=True, exist_ok=True)
    first_occ = {}
    for t in script.tokens:
        if t.is_new_word and t.ref_normalized not in first_occ:
            first_occ[t.ref_normalized] = (t.ref_surface, t.start_ms)
    lines = [f"talk_end_ms\t{end}"]
    for k in range(n_slides):
        words = [s for s, at in first_occ.values() if bounds[k] <= at < bounds[k + 1]]
        body = [rng.choice(FILLERS) for _ in range(30)]
        for w in words:
            body.insert(rng.randrange(5, len(body)), w)
        fname = f"slide{k + 1}.txt"
        (slide_dir / fname).write_text(
            _prose(body, rng, protect=words) + "\n", encoding="utf-8"
        )
        lines.append(f"{bounds[k]}\t{bounds[k + 1]}\t{fname}")
    rel = f"slides/{item['name']}/schedule.tsv"
    (root / rel).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return rel


# --------------------------------------------------------------------------
# top level


def generate_corpus(root: str | Path, seed: int = MASTER_SEED) -> dict:
    rng = random.Random(seed)
    root = Path(root)
    for sub in ("scripts", "refs", "docs", "memory", "slides"):
        (root / sub).mkdir(parents=True, exist_ok=True)

    taken: set = set(RESERVED)
    mains, word_table = _gen_main_scripts(rng, taken)
    aliases = []
    for i in range(2):
        for attempt in range(30):
            try:
                aliases.append(_gen_alias_script(rng, f"alias{i + 1:02d}", taken))
                break
            except GenError:
                continue
        else:
            raise GenError("alias generation kept failing")
    dense = _gen_dense(rng, taken)
    rehm = _gen_rehm(rng)
    demo = _gen_demo(rng)

    manifest = {
        "version": 1,
        "seed": seed,
        "train_vocab": "train.vocab",
        "sets": {
            "main": [m["name"] for m in mains],
            "alias": [a["name"] for a in aliases],
            "dense": ["dense01"],
            "rehm": ["rehm01"],
            "demo": ["demo01"],
        },
        "scripts": {},
        "new_words": word_table,
        "plants": [m["plant"] for m in mains],
    }

    (root / "train.vocab").write_text(
        "\n".join(sorted(set(FILLERS))) + "\n", encoding="utf-8"
    )

    def register(item, **extra):
        name = item["name"]
        save_script(root / f"scripts/{name}.tsv", item["script"])
        save_ref_segments(root / f"refs/{name}.tsv", item["refs"])
        meta = {"script": f"scripts/{name}.tsv", "refs": f"refs/{name}.tsv", **extra}
        manifest["scripts"][name] = meta
        return meta

    for m in mains:
        meta = register(m, doc=f"docs/{m['name']}.txt")
        (root / meta["doc"]).write_text(m["doc"] + "\n", encoding="utf-8")
    slides_rel = _write_slides(root, mains[0], rng)
    manifest["scripts"][mains[0]["name"]]["slides"] = slides_rel

    for a in aliases:
        meta = register(a, alias_memory=f"memory/{a['name']}.tsv")
        store = MemoryStore()
        for surf, _n, _c, conf in a["words"]:
            store.add_entry(surf, aliases=(conf,))
        save_memory_file(root / meta["alias_memory"], store.snapshot())

    register(dense, train_vocab="dense.vocab")
    (root / "dense.vocab").write_text("\n".join(dense["vocab"]) + "\n", encoding="utf-8")

    meta = register(rehm, doc="docs/rehm01.txt", train_vocab="rehm.vocab")
    (root / meta["doc"]).write_text(rehm["doc"] + "\n", encoding="utf-8")
    (root / "rehm.vocab").write_text("\n".join(rehm["vocab"]) + "\n", encoding="utf-8")

    register(demo, alias_memory="memory/demo01.tsv")
    store = MemoryStore()
    store.add_entry("NeoGraph", aliases=("neo graf",))
    save_memory_file(root / "memory/demo01.tsv", store.snapshot())

    # fixture self-check: extraction must reproduce the authored list exactly
    got = extract_new_words(rehm["doc"], TrainingVocabulary.from_words(rehm["vocab"]))
    if got != REHM_WORDS:
        raise GenError(f"rehm fixture extraction mismatch: {got}")

    (root / "corpus.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


def main(argv=None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    root = args[0] if args else "corpus"
    seed = int(args[1]) if len(args) > 1 else MASTER_SEED
    manifest = generate_corpus(root, seed)
    n_scripts = len(manifest["scripts"])
    n_words = len(manifest["new_words"])
    print(f"corpus written to {root}: {n_scripts} scripts, {n_words} new words")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
