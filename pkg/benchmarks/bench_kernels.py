"""Benchmark the compiled kernels against the pure-numpy fallback.

Run `python benchmarks/bench_kernels.py` after building the extension
(pip install -e . --no-build-isolation). Shapes mirror the training hot
path: embedding-table scatter-adds, fused Adam updates on full tables, and
activation gradients on minibatch activations.
"""
import time

import numpy as np

from fairembed._kernels import _numpy_backend

try:
    from fairembed._kernels import _native
except ImportError:
    _native = None


def timeit(fn, repeats=200):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench(name, make_args, call, repeats=200):
    rows = []
    for backend in filter(None, (_numpy_backend, _native)):
        args = make_args()
        dt = timeit(lambda: call(backend, *args), repeats)
        rows.append((backend.NAME, dt))
    base = rows[0][1]
    print(f"{name}:")
    for backend_name, dt in rows:
        speedup = base / dt
        print(f"  {backend_name:<8} {dt * 1e6:10.1f} us   x{speedup:.2f}")
    print()


def main():
    rng = np.random.default_rng(0)
    n_nodes, dim, batch = 100_000, 32, 2048

    table = np.zeros((n_nodes, dim), dtype=np.float32)
    idx = rng.integers(0, n_nodes, size=batch).astype(np.int64)
    rows = rng.normal(size=(batch, dim)).astype(np.float32)
    bench("scatter_add (2048 rows into 100k x 32 table)",
          lambda: (table.copy(), idx, rows),
          lambda b, t, i, r: b.scatter_add(t, i, r))

    param = rng.normal(size=(n_nodes, dim)).astype(np.float32)
    grad = rng.normal(size=(n_nodes, dim)).astype(np.float32)
    bench("adam_update (100k x 32 table)",
          lambda: (param.copy(), grad, np.zeros_like(param),
                   np.zeros_like(param)),
          lambda b, p, g, m, v: b.adam_update(p, g, m, v, 1, 1e-3, 0.9,
                                              0.999, 1e-8),
          repeats=50)

    x = rng.normal(size=(batch, 256)).astype(np.float32)
    g = rng.normal(size=(batch, 256)).astype(np.float32)
    bench("leaky_relu fwd+bwd (2048 x 256)",
          lambda: (x, g),
          lambda b, xx, gg: (b.leaky_relu(xx, 0.01),
                             b.leaky_relu_grad(xx, gg, 0.01)))

    if _native is None:
        print("native backend not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
