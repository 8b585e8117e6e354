#!/usr/bin/env python3
"""Benchmark: compiled propagation kernel vs the numpy fallback.

Times the one-period propagator integration (the hot loop of every sweep)
for both backends over a range of grid sizes, plus one end-to-end
single-point pipeline comparison.  Run as:

    python3 benchmarks/bench_propagation.py
"""

import time

import numpy as np

from floqspin import BathParams, SystemParams, run_point
from floqspin._core import get_kernel

try:
    get_kernel("compiled")
    BACKENDS = ("python", "compiled")
except ImportError:
    print("compiled kernel not built; timing the fallback only\n")
    BACKENDS = ("python",)


def time_call(func, *args, min_time=0.3):
    func(*args)  # warm up
    reps = 1
    while True:
        start = time.perf_counter()
        for _ in range(reps):
            func(*args)
        elapsed = time.perf_counter() - start
        if elapsed >= min_time:
            return elapsed / reps
        reps = max(reps * 2, int(reps * min_time / max(elapsed, 1e-9)))


def main():
    params = (1.0, 0.0, 96.2, 40.0)  # h_x, h_z0, h_z1, omega

    print("one-period propagator, microseconds per call")
    header = f"{'n_steps':>8}" + "".join(f"{b:>14}" for b in BACKENDS)
    if len(BACKENDS) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for n_steps in (256, 1024, 2048, 8192):
        times = {b: time_call(get_kernel(b), *params, n_steps)
                 for b in BACKENDS}
        row = f"{n_steps:>8}" + "".join(f"{times[b] * 1e6:>12.1f}us"
                                        for b in BACKENDS)
        if len(BACKENDS) == 2:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)

    # agreement check: identical physics from both code paths
    if len(BACKENDS) == 2:
        a = get_kernel("compiled")(*params, 2048)
        b = get_kernel("python")(*params, 2048)
        print(f"\nbackend agreement: max|dU| = {np.abs(a - b).max():.2e}")

    system = SystemParams(omega=40.0, theta=np.pi / 2, h_x=1.0, h_z1=96.2)
    bath = BathParams(gamma=0.01, omega_c=10.0, temperature=3.0)
    print("\nfull single-point pipeline (propagate + modes + rates "
          "+ stationary + emission), milliseconds")
    for backend in BACKENDS:
        t = time_call(lambda: run_point(system, bath, backend=backend),
                      min_time=0.5)
        print(f"{backend:>10}: {t * 1e3:8.2f} ms/point")


if __name__ == "__main__":
    main()
