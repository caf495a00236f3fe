"""Compare the compiled and pure-numpy word-sampling kernels.

Usage: python benchmarks/bench_kernels.py [--docs 256] [--L 500] [--V 1000] [--K 10] [--repeat 5]

Both backends consume the same uniforms, so their counts must be identical;
the script checks that before reporting timings.
"""

import argparse
import time

import numpy as np

from topicbounds.kernels import BACKENDS


def cdf_rows(p):
    c = np.cumsum(p, axis=1)
    return np.ascontiguousarray(c / c[:, -1:])


def make_inputs(docs, L, V, K, seed):
    rng = np.random.default_rng(seed)
    topic_cdf = cdf_rows(rng.dirichlet(np.ones(K), size=docs))
    word_cdf = cdf_rows(rng.dirichlet(np.full(V, 0.1), size=K))
    return topic_cdf, word_cdf, rng.random((docs, L)), rng.random((docs, L))


def best_time(kernel, inputs, V, repeat):
    topic_cdf, word_cdf, u_topic, u_word = inputs
    best = np.inf
    for _ in range(repeat):
        counts = np.zeros((u_topic.shape[0], V), dtype=np.int64)
        start = time.perf_counter()
        kernel.sample_word_counts(topic_cdf, word_cdf, u_topic, u_word, counts)
        best = min(best, time.perf_counter() - start)
    return best, counts


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=256)
    parser.add_argument("--L", type=int, default=500)
    parser.add_argument("--V", type=int, default=1000)
    parser.add_argument("--K", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    inputs = make_inputs(args.docs, args.L, args.V, args.K, args.seed)
    words = args.docs * args.L
    results = {name: best_time(kernel, inputs, args.V, args.repeat) for name, kernel in BACKENDS.items()}
    counts = [c for _, c in results.values()]
    if any(not np.array_equal(counts[0], c) for c in counts[1:]):
        raise SystemExit("backends disagree")

    print(f"docs={args.docs} L={args.L} V={args.V} K={args.K} ({words} words, best of {args.repeat})")
    for name, (seconds, _) in results.items():
        print(f"{name:>7}: {seconds * 1e3:9.2f} ms  {words / seconds / 1e6:7.2f} Mwords/s")
    if "cython" in results:
        print(f"speedup: {results['python'][0] / results['cython'][0]:.1f}x")


if __name__ == "__main__":
    main()
