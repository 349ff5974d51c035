"""Compare the numba and pure-numpy backends of the dense hot kernels.

Run directly:

    python benchmarks/bench_backends.py [--sizes 64,128,256,512] [--repeat 5]

The numba path is exercised through the installed backend (set
ZASSUCC_BACKEND=numba, the default) and the numpy path through the
backend-independent reference functions, so both run in one process.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from zassucc._kernels import BACKEND, expm_dense, expm_dense_numpy, trotter_power


def _random_antisymmetric(n: int, rng) -> np.ndarray:
    m = rng.standard_normal((n, n))
    return (m - m.T) / np.sqrt(n)


def _time(fn, *args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="64,128,256,512")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.Generator(np.random.Philox(args.seed))

    print(f"active backend: {BACKEND}")
    if BACKEND != "numba":
        print("note: numba backend unavailable or disabled; both columns run numpy")

    # warm up the jit before timing
    expm_dense(_random_antisymmetric(8, rng))
    trotter_power(np.eye(8), np.eye(8), 4)

    header = f"{'kernel':<14}{'n':>6}{'backend [s]':>14}{'numpy [s]':>14}{'speedup':>10}{'max|diff|':>12}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        a = _random_antisymmetric(n, rng)
        t_backend = _time(expm_dense, a, repeat=args.repeat)
        t_numpy = _time(expm_dense_numpy, a, repeat=args.repeat)
        diff = float(np.max(np.abs(expm_dense(a) - expm_dense_numpy(a))))
        print(f"{'expm_dense':<14}{n:>6}{t_backend:>14.6f}{t_numpy:>14.6f}"
              f"{t_numpy / t_backend:>10.2f}{diff:>12.2e}")
    for n in sizes:
        ex = expm_dense_numpy(_random_antisymmetric(n, rng))
        ey = expm_dense_numpy(_random_antisymmetric(n, rng))
        t_backend = _time(trotter_power, ex, ey, 64, repeat=args.repeat)

        def numpy_power(a, b, k):
            step = a @ b
            out = np.eye(a.shape[0])
            for _ in range(k):
                out = out @ step
            return out

        t_numpy = _time(numpy_power, ex, ey, 64, repeat=args.repeat)
        diff = float(np.max(np.abs(trotter_power(ex, ey, 64) - numpy_power(ex, ey, 64))))
        print(f"{'trotter_power':<14}{n:>6}{t_backend:>14.6f}{t_numpy:>14.6f}"
              f"{t_numpy / t_backend:>10.2f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
