"""Both kernel backends against an independent brute-force reference."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from membooth._kernels import BACKEND, INF, backends
from tests.conftest import brute_levenshtein

ALPHA = "abcdef"


def random_word(rng, lo=0, hi=12):
    return "".join(rng.choice(ALPHA) for _ in range(rng.randint(lo, hi)))


@pytest.fixture(params=sorted(backends()))
def kern(request):
    return backends()[request.param]


def test_compiled_backend_is_active():
    # the package must not silently fall back when the extension is built
    assert BACKEND in ("compiled", "python")
    assert "python" in backends()


def test_levenshtein_known_values(kern):
    assert kern.levenshtein("", "") == 0
    assert kern.levenshtein("abc", "") == 3
    assert kern.levenshtein("", "abc") == 3
    assert kern.levenshtein("kitten", "sitting") == 3
    assert kern.levenshtein("weasly", "weesley") == 2
    assert kern.levenshtein("workflows", "work flows") == 1


def test_levenshtein_random_vs_brute(kern):
    rng = random.Random(7)
    for _ in range(400):
        a, b = random_word(rng), random_word(rng)
        assert kern.levenshtein(a, b) == brute_levenshtein(a, b)


def test_bounded_levenshtein_agrees_or_exceeds(kern):
    rng = random.Random(8)
    for _ in range(400):
        a, b = random_word(rng), random_word(rng)
        bound = rng.randint(0, 6)
        d = brute_levenshtein(a, b)
        got = kern.levenshtein_bounded(a, b, bound)
        if d <= bound:
            assert got == d
        else:
            assert got == bound + 1


def test_segment_pass_matches_definition(kern):
    # the kernel works on integer word ids
    rng = random.Random(9)
    for _ in range(150):
        n = rng.randint(0, 7)
        hyp = [rng.randint(0, 4) for _ in range(n)]
        ref = [rng.randint(0, 4) for _ in range(rng.randint(0, 5))]
        init = [rng.randint(0, 9) if rng.random() < 0.8 else INF for _ in range(n + 1)]
        if all(v >= INF for v in init):
            init[rng.randint(0, n)] = 0
        out = kern.segment_pass(hyp, ref, init)
        for i in range(n + 1):
            want = min(
                init[o] + _seq_edit(hyp[o:i], ref) for o in range(i + 1)
            )
            assert out[i] == want, (hyp, ref, init, i)


def _seq_edit(a, b):
    n, m = len(a), len(b)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dp[i][0] = i
    for j in range(m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            dp[i][j] = min(dp[i - 1][j] + 1, dp[i][j - 1] + 1, dp[i - 1][j - 1] + cost)
    return dp[n][m]


def test_backends_agree_with_each_other():
    mods = backends()
    if len(mods) < 2:
        pytest.skip("only one backend importable here")
    rng = random.Random(10)
    for _ in range(300):
        a, b = random_word(rng), random_word(rng)
        vals = {name: m.levenshtein(a, b) for name, m in mods.items()}
        assert len(set(vals.values())) == 1, vals


@settings(max_examples=150, deadline=None)
@given(st.text(ALPHA, max_size=10), st.text(ALPHA, max_size=10))
def test_levenshtein_symmetry_and_bounds(a, b):
    from membooth._kernels import levenshtein

    d = levenshtein(a, b)
    assert d == levenshtein(b, a)
    assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))
    assert (d == 0) == (a == b)
