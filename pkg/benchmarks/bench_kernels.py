"""Time the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--tweets 4000] [--nodes 20000] [--repeat 3]
"""
import argparse
import time

import numpy as np
import scipy.sparse as sp

from langprop import _kernels_py

try:
    from langprop import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def topk_case(rng, n, vocab):
    X = sp.random(n, vocab, density=30 / vocab, random_state=rng, format="csr",
                  data_rvs=lambda k: rng.integers(1, 4, size=k).astype(float))
    X.sort_indices()
    XT = X.T.tocsr()
    XT.sort_indices()
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    rank = np.arange(n, dtype=np.int64)
    k = max(1, n // 4)
    return (X.indptr.astype(np.int64), X.indices.astype(np.int32), X.data,
            XT.indptr.astype(np.int64), XT.indices.astype(np.int32), XT.data, norms, rank, k, 0, n)


def sweep_case(rng, n, labels, degree):
    W = sp.random(n, n, density=degree / n, random_state=rng, format="csr")
    W = (W + W.T).tocsr()
    W.sort_indices()
    Y = rng.random((n, labels))
    base = rng.random((n, labels))
    inv_m = 1.0 / (1.0 + rng.random(n))
    out = np.empty_like(Y)
    return (W.indptr.astype(np.int64), W.indices.astype(np.int32), W.data, Y, base, inv_m, 0.01, out)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tweets", type=int, default=4000)
    parser.add_argument("--vocab", type=int, default=20000)
    parser.add_argument("--nodes", type=int, default=20000)
    parser.add_argument("--degree", type=int, default=20)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if compiled is None:
        print("compiled kernels not built; only the fallback is timed")

    rng = np.random.default_rng(0)
    cases = {
        f"topk_cosine ({args.tweets} tweets)": ("topk_cosine", topk_case(rng, args.tweets, args.vocab)),
        f"mad_sweep ({args.nodes} nodes, 7 labels)": ("mad_sweep", sweep_case(rng, args.nodes, 7, args.degree)),
    }
    print(f"{'kernel':40}{'python':>10}{'cython':>10}{'speedup':>10}")
    for name, (fn, inputs) in cases.items():
        t_py = best_of(lambda: getattr(_kernels_py, fn)(*inputs), args.repeat)
        if compiled is None:
            print(f"{name:40}{t_py:10.3f}{'-':>10}{'-':>10}")
            continue
        t_c = best_of(lambda: getattr(compiled, fn)(*inputs), args.repeat)
        print(f"{name:40}{t_py:10.3f}{t_c:10.3f}{t_py / t_c:9.1f}x")


if __name__ == "__main__":
    main()
