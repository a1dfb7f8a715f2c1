import random

import pytest

from membooth.corpus import Corpus

CORPUS_ROOT = "corpus"


@pytest.fixture(scope="session")
def corpus():
    return Corpus.load(CORPUS_ROOT)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def brute_levenshtein(a: str, b: str) -> int:
    # independent reference: full DP table, no tricks
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


def brute_word_edit(a, b) -> int:
    return brute_levenshtein_seq(list(a), list(b))


def brute_levenshtein_seq(a, b) -> int:
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


def brute_segment_mwer(hyp, refs):
    """Exhaustive optimal segmentation: min total distance, then smallest
    boundary vector lexicographically. Only viable for tiny instances."""
    from itertools import combinations_with_replacement

    n = len(hyp)
    best = None
    for interior in combinations_with_replacement(range(n + 1), len(refs) - 1):
        bounds = (0,) + interior + (n,)
        if any(b < a for a, b in zip(bounds, bounds[1:])):
            continue
        total = sum(
            brute_levenshtein_seq(hyp[bounds[k]:bounds[k + 1]], refs[k])
            for k in range(len(refs))
        )
        key = (total, bounds)
        if best is None or key < best:
            best = key
    return best
