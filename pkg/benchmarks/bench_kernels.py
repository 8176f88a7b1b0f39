#!/usr/bin/env python3
"""Benchmark the compiled text kernels against the pure-Python fallback.

Workload: tokenize + lexical overlap over the bundled mini-corpus, repeated,
which is the hot loop of corpus_stats/annotate/filter on large corpora.
"""

import io
import time
from importlib import resources

from faithctl import _pure_kernel, corpus

try:
    from faithctl import _speedups
except ImportError:
    _speedups = None

REPEATS = 200


def run(kernel, examples):
    total = 0
    for _ in range(REPEATS):
        for ex in examples:
            r = kernel.tokenize_kernel(ex.response)
            e = kernel.tokenize_kernel(ex.evidence)
            matched_r, _ = kernel.overlap_counts(r, e)
            total += matched_r
    return total


def main():
    text = resources.files("faithctl.data").joinpath("mini_corpus.jsonl").read_text("utf-8")
    examples = corpus.ingest(io.StringIO(text))
    n_calls = 2 * REPEATS * len(examples)

    kernels = [("pure", _pure_kernel)]
    if _speedups is not None:
        kernels.append(("compiled", _speedups))
    else:
        print("compiled extension not built; benchmarking pure kernel only")

    timings = {}
    for name, kernel in kernels:
        run(kernel, examples[:10])  # warm up
        start = time.perf_counter()
        checksum = run(kernel, examples)
        elapsed = time.perf_counter() - start
        timings[name] = elapsed
        print(f"{name:>9}: {elapsed:.3f}s  ({n_calls / elapsed:,.0f} tokenize calls/s, checksum {checksum})")

    if "compiled" in timings:
        print(f"  speedup: {timings['pure'] / timings['compiled']:.2f}x")


if __name__ == "__main__":
    main()
