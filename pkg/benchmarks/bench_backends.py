#!/usr/bin/env python3
"""Compare the compiled and pure-NumPy round-evaluation backends.

Times the subset-evaluation kernel in isolation and a full online pass on
a synthetic stream, printing rounds/second for each backend.
"""
import time

import numpy as np

from graphmkl import data, graph, kernels, learner
from graphmkl.backends import python as py_backend

try:
    from graphmkl.backends import _fast as fast_backend
except ImportError:
    fast_backend = None


def bench_evaluate(backend, psi, thetas, subset, xs, repeats=2000):
    start = time.perf_counter()
    for i in range(repeats):
        backend.evaluate_subset(psi, thetas, subset, xs[i % len(xs)])
    return repeats / (time.perf_counter() - start)


def bench_stream(backend_name, stream, fgraph, hp, psi):
    import graphmkl.backends as b
    saved = b.evaluate_subset
    b.evaluate_subset = (fast_backend.evaluate_subset if backend_name == "cython"
                         else py_backend.evaluate_subset)
    try:
        start = time.perf_counter()
        learner.run_stream(stream.features, stream.targets, fgraph, hp, psi,
                           np.random.default_rng(0))
        return stream.num_samples / (time.perf_counter() - start)
    finally:
        b.evaluate_subset = saved


def main():
    n, num_rf, dim, m = 41, 50, 5, 5
    specs = kernels.default_dictionary(n)
    rng = np.random.default_rng(0)
    fmaps = [kernels.sample_spectral(s, num_rf, dim, rng) for s in specs]
    psi = kernels.spectral_stack(fmaps)
    thetas = rng.normal(size=(n, 2 * num_rf))
    subset = np.arange(m, dtype=np.intp)
    xs = rng.random((64, dim)) / np.sqrt(dim)

    print(f"subset evaluation (N={n}, D={num_rf}, d={dim}, |S|={m}):")
    rate = bench_evaluate(py_backend, psi, thetas, subset, xs)
    print(f"  python : {rate:10.0f} calls/s")
    if fast_backend is not None:
        rate = bench_evaluate(fast_backend, psi, thetas, subset, xs)
        print(f"  cython : {rate:10.0f} calls/s")
    else:
        print("  cython : not built")

    horizon = 2000
    gen = data.SyntheticSpec(kernel=specs[20], input_dim=dim, num_rf=num_rf,
                             noise=0.01)
    stream = data.synthetic_stream(gen, seed=0, horizon=horizon)
    sim = graph.similarity_matrix(specs, dim)
    fgraph = graph.build_graph(specs, m, dim, sim=sim)
    hp = learner.Hyperparams(eta=1 / np.sqrt(horizon), xi=1 / np.sqrt(horizon),
                             num_rf=num_rf, out_degree=m, exploit_after=None)

    print(f"full online pass (T={horizon}):")
    print(f"  python : {bench_stream('python', stream, fgraph, hp, psi):10.0f} rounds/s")
    if fast_backend is not None:
        print(f"  cython : {bench_stream('cython', stream, fgraph, hp, psi):10.0f} rounds/s")


if __name__ == "__main__":
    main()
