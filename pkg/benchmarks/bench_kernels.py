"""Compare the compiled split kernel with the numpy fallback.

Times ``best_split`` on random columns of several sizes, then a full M5 fit
on the default synthetic suite under each backend.

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ccasched import kernels
from ccasched.config_space import Architecture
from ccasched.dataset import build_training_table, split
from ccasched.features import PAPER_FEATURE_INDICES
from ccasched.models import M5Params, fit_m5
from ccasched.synthetic import SyntheticSpec, generate_synthetic


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_split(repeat: int) -> None:
    rng = np.random.default_rng(0)
    print(f"{'n':>8} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for n in (100, 1_000, 10_000, 100_000):
        x = np.sort(rng.integers(0, n // 4 + 1, n).astype(float))
        y = rng.normal(size=n)
        y -= y.mean()
        py = best_of(lambda: kernels.python_best_split(x, y, 4, 0), repeat)
        if kernels.compiled_best_split is None:
            print(f"{n:>8} {1e3 * py:>10.3f} {'n/a':>10} {'':>8}")
            continue
        cy = best_of(lambda: kernels.compiled_best_split(x, y, 4, 0), repeat)
        print(f"{n:>8} {1e3 * py:>10.3f} {1e3 * cy:>10.3f} {py / cy:>7.1f}x")


def bench_m5(repeat: int) -> None:
    arch = Architecture()
    ds, _ = generate_synthetic(SyntheticSpec(), arch)
    tr, _ = split(build_training_table(ds, arch, PAPER_FEATURE_INDICES), 0.7, 42)
    saved = kernels.best_split
    try:
        for name, fn in (("python", kernels.python_best_split), ("cython", kernels.compiled_best_split)):
            if fn is None:
                continue
            kernels.best_split = fn
            t = best_of(lambda: fit_m5(tr.X, tr.y, M5Params()), repeat)
            print(f"M5 fit on {tr.n_rows} rows with {name} kernel: {t:.3f} s")
    finally:
        kernels.best_split = saved


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    bench_split(args.repeat)
    bench_m5(max(1, args.repeat // 2))


if __name__ == "__main__":
    main()
