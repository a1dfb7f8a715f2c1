"""Pure-Python / numpy fallback for the compiled edit-distance kernels.

Same contract as ``_speed``; selected automatically when the extension is
not built.
"""

import numpy as np

INF = 2**62


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance between two strings (character level)."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    for i in range(la):
        ca = a[i]
        row = [i + 1]
        for j in range(lb):
            sub = prev[j] + (0 if ca == b[j] else 1)
            row.append(min(sub, prev[j + 1] + 1, row[j] + 1))
        prev = row
    return prev[lb]


def levenshtein_bounded(a: str, b: str, bound: int) -> int:
    """Edit distance if it does not exceed ``bound``, else ``bound + 1``."""
    la, lb = len(a), len(b)
    if bound < 0:
        return 0 if (la == 0 and lb == 0 and bound == 0) else bound + 1
    if abs(la - lb) > bound:
        return bound + 1
    if la == 0 or lb == 0:
        d = max(la, lb)
        return d if d <= bound else bound + 1
    prev = list(range(lb + 1))
    for i in range(la):
        ca = a[i]
        row = [i + 1]
        for j in range(lb):
            sub = prev[j] + (0 if ca == b[j] else 1)
            row.append(min(sub, prev[j + 1] + 1, row[j] + 1))
        if min(row) > bound:
            return bound + 1
        prev = row
    return prev[lb] if prev[lb] <= bound else bound + 1


def segment_pass(hyp, ref, init):
    """One free-start alignment pass used by the segment-alignment DP.

    ``out[i] = min over o <= i of init[o] + editdist(hyp[o:i], ref)``.
    Vectorised over hypothesis positions; the in-row insertion dependency is
    resolved with the running-minimum identity
    ``min_j<=i (c[j] + i - j) = i + prefixmin(c[j] - j)``.
    """
    n = len(hyp)
    idx = np.arange(n + 1, dtype=np.int64)
    row = np.minimum(np.asarray(init, dtype=np.int64), INF)
    row = np.minimum.accumulate(row - idx) + idx
    if n:
        hyp_arr = np.asarray(hyp, dtype=np.int64)
    for t in ref:
        cand = np.empty(n + 1, dtype=np.int64)
        cand[0] = row[0] + 1
        if n:
            cand[1:] = np.minimum(row[1:] + 1, row[:-1] + (hyp_arr != t))
        row = np.minimum.accumulate(cand - idx) + idx
    return row.tolist()
