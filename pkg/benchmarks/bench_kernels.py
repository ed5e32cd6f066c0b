"""Benchmark the hot numeric kernels with and without numba.

The numba/numpy switch is decided at import time from OPINIONTRACK_NO_NUMBA,
so the comparison runs each variant in a fresh subprocess:

    python3 benchmarks/bench_kernels.py
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def bench(fn, *args, repeat=20):
    fn(*args)  # warm-up (numba compiles here)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def run_kernels():
    from opiniontrack import _accel, kalman, linear

    rng = np.random.default_rng(0)
    results = {"numba": _accel.NUMBA_ENABLED}

    y = rng.normal(size=100_000)
    mask = np.ones_like(y, dtype=np.bool_)
    filt = kalman.local_level_filter
    results["kalman_100k_steps"] = bench(filt, y, mask, 0.1, 1.0, y[0], 10.0)

    X = rng.normal(size=(2000, 400))
    yb = (rng.random(2000) < 0.5).astype(np.float64)
    w = rng.normal(size=400)
    results["binary_grad_2000x400"] = bench(
        linear.binary_loss_grad, X, yb, w, 0.0, 1e-3)

    ym = rng.integers(0, 3, size=2000)
    W = rng.normal(size=(3, 400))
    b = np.zeros(3)
    results["multinomial_grad_2000x400"] = bench(
        linear.multinomial_loss_grad, X, ym, W, b, 1e-3)

    print(json.dumps(results))


def compare():
    here = os.path.abspath(__file__)
    rows = {}
    for label, env_val in (("numba", ""), ("numpy", "1")):
        env = dict(os.environ, OPINIONTRACK_NO_NUMBA=env_val)
        out = subprocess.run([sys.executable, here, "--run"], env=env,
                             capture_output=True, text=True, check=True)
        rows[label] = json.loads(out.stdout.strip().splitlines()[-1])

    kernels = [k for k in rows["numba"] if k != "numba"]
    width = max(len(k) for k in kernels)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'numpy':>10}  speedup")
    for k in kernels:
        a, b = rows["numba"][k], rows["numpy"][k]
        print(f"{k:<{width}}  {a * 1e3:>8.3f}ms  {b * 1e3:>8.3f}ms  {b / a:>6.2f}x")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--run", action="store_true",
                        help="time the kernels in the current process")
    if parser.parse_args().run:
        run_kernels()
    else:
        compare()
