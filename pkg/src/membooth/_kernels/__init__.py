"""Edit-distance kernels: compiled extension when built, numpy fallback otherwise."""

try:
    from membooth._kernels import _speed as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built
    from membooth._kernels import _slow as _impl

    BACKEND = "python"

from membooth._kernels import _slow

levenshtein = _impl.levenshtein
levenshtein_bounded = _impl.levenshtein_bounded
segment_pass = _impl.segment_pass

INF = 2**62


def backends():
    """Name -> module for every importable backend (used by tests and the benchmark)."""
    out = {"python": _slow}
    if BACKEND == "compiled":
        out["compiled"] = _impl
    return out
