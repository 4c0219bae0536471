"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--skip-e2e]

Kernel timings call both backends in-process. The end-to-end timing runs one
Sunspot ANN cell in a fresh interpreter per backend, selected with
HYBRIDCAST_DISABLE_NUMBA, so import and JIT costs are included.
"""
import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from hybridcast.kernels import backend


def cases(rng):
    y = rng.normal(size=5000).cumsum()
    X = rng.uniform(size=(220, 8))
    t = rng.uniform(size=220)
    W, b, v = rng.uniform(-.5, .5, (8, 8)), rng.uniform(-.5, .5, 8), rng.uniform(-.5, .5, 8)
    Xv, tv = np.empty((0, 8)), np.empty(0)
    return {
        "trailing_mean(n=5000, m=40)": lambda k: k.trailing_mean(y, 40),
        "arma_residuals(n=5000, p=9, q=2)":
            lambda k: k.arma_residuals(y, 0.1, np.full(9, 0.05), np.array([0.2, -0.1])),
        "local_extrema(n=5000)": lambda k: k.local_extrema(y),
        "zero_crossings(n=5000)": lambda k: k.zero_crossings(y),
        "mlp_loss_grad(220x8, H=8)": lambda k: k.mlp_loss_grad(X, t, W, b, v, 0.0),
        "mlp_train_adam(220x8, H=8, 500 epochs)":
            lambda k: k.mlp_train_adam(X, t, Xv, tv, W.copy(), b.copy(), v.copy(), 0.0,
                                       0.01, 0.9, 0.999, 1e-8, 500, 499),
    }


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    fast, slow = backend("numba"), backend("numpy")
    print(f"{'kernel':<42}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, call in cases(rng).items():
        call(fast)  # compile outside the timed region
        times = []
        for mod in (fast, slow):
            n, _ = timeit.Timer(lambda: call(mod)).autorange()
            best = min(timeit.repeat(lambda: call(mod), number=n, repeat=repeat)) / n
            times.append(best * 1e3)
        print(f"{name:<42}{times[0]:>12.4f}{times[1]:>12.4f}{times[1] / times[0]:>9.1f}x")


E2E = ("import warnings; warnings.simplefilter('ignore');"
       "from hybridcast.bench import descriptor, load_dataset;"
       "from hybridcast.hybrids import PipelineSpec, run_pipeline;"
       "from hybridcast.series import split;"
       "ts = load_dataset(descriptor('sunspot')); tr, te = split(ts, 221);"
       "run_pipeline(tr, te, PipelineSpec('ann', ann_arch=(4, 4), runs=20))")


def end_to_end():
    print("\nend to end: Sunspot ANN cell, 20 seeds, fresh interpreter")
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, HYBRIDCAST_DISABLE_NUMBA=flag)
        t0 = time.perf_counter()
        subprocess.run([sys.executable, "-c", E2E], env=env, check=True)
        print(f"  {label:<6}{time.perf_counter() - t0:8.2f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    kernel_table(args.repeat)
    if not args.skip_e2e:
        end_to_end()


if __name__ == "__main__":
    main()
