"""Compare the compiled edit-distance kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--pairs N] [--repeat N]
"""

import argparse
import random
import string
import time

from membooth._kernels import BACKEND, backends


def word_pairs(rng, n):
    def word():
        return "".join(rng.choice(string.ascii_lowercase)
                       for _ in range(rng.randint(3, 12)))
    return [(word(), word()) for _ in range(n)]


def bench(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = random.Random(7)
    pairs = word_pairs(rng, args.pairs)
    hyp = [rng.randrange(50) for _ in range(400)]
    refs = [[rng.randrange(50) for _ in range(20)] for _ in range(40)]
    init = [0] + [2**62] * len(hyp)

    mods = backends()
    print(f"active backend: {BACKEND}")
    sanity = [(k, mods["python"].levenshtein(a, b)) for k, (a, b) in
              enumerate(pairs[:200])]

    results = {}
    for name, mod in mods.items():
        for got_k, want in sanity:
            a, b = pairs[got_k]
            assert mod.levenshtein(a, b) == want, f"{name} disagrees on {a}/{b}"

        lev = bench(lambda: [mod.levenshtein(a, b) for a, b in pairs],
                    args.repeat)
        bounded = bench(lambda: [mod.levenshtein_bounded(a, b, 2)
                                 for a, b in pairs], args.repeat)
        seg = bench(lambda: [mod.segment_pass(hyp, r, init) for r in refs],
                    args.repeat)
        results[name] = {"levenshtein": lev, "levenshtein_bounded": bounded,
                         "segment_pass": seg}

    both = "python" in results and "compiled" in results
    header = f"{'kernel':<22}" + "".join(f"{n:>14}" for n in results)
    print(header + (f"{'speedup':>10}" if both else ""))
    for kernel in ("levenshtein", "levenshtein_bounded", "segment_pass"):
        row = f"{kernel:<22}"
        row += "".join(f"{results[n][kernel] * 1000:>12.1f}ms" for n in results)
        if both:
            row += f"{results['python'][kernel] / results['compiled'][kernel]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
