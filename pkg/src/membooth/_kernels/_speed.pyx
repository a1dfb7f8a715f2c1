# cython: language_level=3
"""Compiled edit-distance kernels (hot loops for matching and segment alignment)."""

from libc.stdlib cimport free, malloc

DEF INF = 4611686018427387904  # 2**62, safe against additive overflow


cdef inline long long _min3(long long a, long long b, long long c) nogil:
    cdef long long m = a
    if b < m:
        m = b
    if c < m:
        m = c
    return m


def levenshtein(str a, str b):
    """Unit-cost edit distance between two strings (character level)."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef Py_ssize_t i, j
    cdef long long sub, cur
    cdef long long *prev = <long long *> malloc((lb + 1) * sizeof(long long))
    cdef long long *row = <long long *> malloc((lb + 1) * sizeof(long long))
    if prev == NULL or row == NULL:
        if prev != NULL:
            free(prev)
        if row != NULL:
            free(row)
        raise MemoryError()
    try:
        for j in range(lb + 1):
            prev[j] = j
        for i in range(la):
            row[0] = i + 1
            for j in range(lb):
                sub = prev[j] + (0 if a[i] == b[j] else 1)
                cur = _min3(sub, prev[j + 1] + 1, row[j] + 1)
                row[j + 1] = cur
            prev, row = row, prev
        return prev[lb]
    finally:
        free(prev)
        free(row)


def levenshtein_bounded(str a, str b, long long bound):
    """Edit distance if it does not exceed ``bound``, else ``bound + 1``.

    Aborts a row early once every cell exceeds the bound.
    """
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef long long diff = la - lb if la >= lb else lb - la
    if bound < 0:
        return 0 if (la == 0 and lb == 0 and bound == 0) else bound + 1
    if diff > bound:
        return bound + 1
    if la == 0:
        return lb if lb <= bound else bound + 1
    if lb == 0:
        return la if la <= bound else bound + 1
    cdef Py_ssize_t i, j
    cdef long long sub, cur, rowmin
    cdef long long *prev = <long long *> malloc((lb + 1) * sizeof(long long))
    cdef long long *row = <long long *> malloc((lb + 1) * sizeof(long long))
    if prev == NULL or row == NULL:
        if prev != NULL:
            free(prev)
        if row != NULL:
            free(row)
        raise MemoryError()
    try:
        for j in range(lb + 1):
            prev[j] = j
        for i in range(la):
            row[0] = i + 1
            rowmin = row[0]
            for j in range(lb):
                sub = prev[j] + (0 if a[i] == b[j] else 1)
                cur = _min3(sub, prev[j + 1] + 1, row[j] + 1)
                row[j + 1] = cur
                if cur < rowmin:
                    rowmin = cur
            if rowmin > bound:
                return bound + 1
            prev, row = row, prev
        if prev[lb] > bound:
            return bound + 1
        return prev[lb]
    finally:
        free(prev)
        free(row)


def segment_pass(hyp, ref, init):
    """One free-start alignment pass used by the segment-alignment DP.

    Returns ``out`` with ``out[i] = min over o <= i of init[o] + editdist(hyp[o:i], ref)``
    where ``hyp`` and ``ref`` are sequences of token ids and ``init`` carries the
    accumulated cost of earlier segments (INF-like sentinels allowed).
    """
    cdef Py_ssize_t n = len(hyp), r = len(ref), i, k
    cdef long long *h = NULL
    cdef long long *row = NULL
    cdef long long *nxt = NULL
    cdef long long t, best, c
    h = <long long *> malloc((n if n > 0 else 1) * sizeof(long long))
    row = <long long *> malloc((n + 1) * sizeof(long long))
    nxt = <long long *> malloc((n + 1) * sizeof(long long))
    if h == NULL or row == NULL or nxt == NULL:
        if h != NULL:
            free(h)
        if row != NULL:
            free(row)
        if nxt != NULL:
            free(nxt)
        raise MemoryError()
    try:
        for i in range(n):
            h[i] = hyp[i]
        # Row for the empty reference prefix: running min of init[o] + (i - o).
        best = init[0]
        if best > INF:
            best = INF
        row[0] = best
        for i in range(1, n + 1):
            c = init[i]
            if c > INF:
                c = INF
            best = best + 1
            if c < best:
                best = c
            row[i] = best
        for k in range(r):
            t = ref[k]
            nxt[0] = row[0] + 1
            for i in range(1, n + 1):
                c = row[i] + 1  # ref token deleted
                if row[i - 1] + (0 if h[i - 1] == t else 1) < c:
                    c = row[i - 1] + (0 if h[i - 1] == t else 1)
                if nxt[i - 1] + 1 < c:  # hyp token inserted
                    c = nxt[i - 1] + 1
                nxt[i] = c
            row, nxt = nxt, row
        return [row[i] for i in range(n + 1)]
    finally:
        free(h)
        free(row)
        free(nxt)
