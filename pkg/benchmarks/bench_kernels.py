"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel with the median wall time of each backend and the
speed-up, then a full eigenvalue solve under each backend.
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from ptquartic import _pykernels

try:
    from ptquartic import _kernels
except ImportError:
    _kernels = None

COEFFS = (0.4 + 0j, -1.2 + 0j, -2.0 + 0j, 0j, 1 + 0j)
SEGMENT = (3.0 + 1.0j, -2.0 + 2.0j, 0.2 - 0.1j, 1.0 + 0.3j, 1.5, COEFFS, 1e-11, 0.1)
SERIES = (1.0, 0.5, -0.5, -3.0 + 0.2j, 6.0 * np.exp(1j * np.pi / 3), 200)

SOLVE = ("from ptquartic.spectrum import lowest_levels; import time; t=time.perf_counter(); "
         "lowest_levels(0.5, 0.5, 5); print(time.perf_counter()-t)")


def median_time(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return statistics.median(times)


def solve_time(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["PTQUARTIC_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", SOLVE], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; nothing to compare")
        return
    print(f"{'kernel':<22}{'cython (s)':>12}{'python (s)':>12}{'speed-up':>10}")
    for name, fargs in (("integrate_segment", SEGMENT), ("riccati_series", SERIES)):
        tc = median_time(getattr(_kernels, name), fargs, args.repeat)
        tp = median_time(getattr(_pykernels, name), fargs, args.repeat)
        print(f"{name:<22}{tc:>12.5f}{tp:>12.5f}{tp / tc:>10.1f}")
    tc, tp = solve_time(False), solve_time(True)
    print(f"{'lowest_levels(n=5)':<22}{tc:>12.5f}{tp:>12.5f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
