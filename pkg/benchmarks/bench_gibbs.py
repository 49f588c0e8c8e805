"""Benchmark the compiled Gibbs-sampling kernel against the pure-Python
fallback and verify that both produce bitwise-identical output.

Usage: python benchmarks/bench_gibbs.py [--tokens N] [--iterations N]
"""

import argparse
import time

import numpy as np

import recession_signal.lda as lda
from recession_signal.lda import _gibbs_py


def run(backend, doc_ids, word_ids, M, K, V, iterations):
    t0 = time.perf_counter()
    phi, theta, n = backend.run_gibbs(doc_ids, word_ids, M, K, V,
                                      50.0 / K, 0.1, iterations,
                                      iterations // 2, 10, 42, True)
    return time.perf_counter() - t0, np.asarray(phi), np.asarray(theta)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tokens", type=int, default=50_000)
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--vocab", type=int, default=2_000)
    parser.add_argument("--topics", type=int, default=30)
    parser.add_argument("--iterations", type=int, default=200)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    doc_ids = rng.integers(0, args.docs, args.tokens).astype(np.int32)
    word_ids = rng.integers(0, args.vocab, args.tokens).astype(np.int32)

    print(f"tokens={args.tokens} docs={args.docs} vocab={args.vocab} "
          f"topics={args.topics} iterations={args.iterations}")
    print(f"active backend at import time: {lda.BACKEND}")

    t_c, phi_c, theta_c = run(lda.backend, doc_ids, word_ids, args.docs,
                              args.topics, args.vocab, args.iterations)
    t_p, phi_p, theta_p = run(_gibbs_py, doc_ids, word_ids, args.docs,
                              args.topics, args.vocab, args.iterations)

    rate_c = args.tokens * args.iterations / t_c
    rate_p = args.tokens * args.iterations / t_p
    print(f"{lda.BACKEND:>8}: {t_c:8.2f}s  ({rate_c:12.0f} token-updates/s)")
    print(f"{'python':>8}: {t_p:8.2f}s  ({rate_p:12.0f} token-updates/s)")
    if lda.BACKEND != "python":
        print(f"speedup: {t_p / t_c:.1f}x")
    identical = (np.array_equal(phi_c, phi_p) and np.array_equal(theta_c, theta_p))
    print(f"bitwise identical output: {identical}")
    if not identical:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
