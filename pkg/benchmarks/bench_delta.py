"""Benchmark the sweep kernel backends.

Times one sweep step (windowed max-times circular correlation) for the
compiled extension and the NumPy fallback across grid sizes, and checks
that both produce identical output.

Run:  python benchmarks/bench_delta.py
"""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from grassmannlab import kernels  # noqa: E402


def time_backend(fn, values, repeats):
    fn(values)  # warm tables
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        x = values
        for _ in range(repeats):
            x = fn(x)
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def main() -> int:
    rng = np.random.default_rng(0)
    print(f"compiled extension available: {kernels._sweepkern is not None}")
    print(f"{'N':>6} {'numpy ms':>10} {'compiled ms':>12} {'speedup':>8}  identical")
    for n in (256, 1024, 2048, 8192):
        values = rng.uniform(0.1, 1.0, n)
        repeats = max(5, 2_000_000 // n)
        t_np = time_backend(kernels._delta_numpy, values, repeats)
        if kernels._sweepkern is not None:
            t_c = time_backend(kernels._delta_compiled, values, repeats)
            same = np.array_equal(kernels._delta_numpy(values),
                                  kernels._delta_compiled(values))
            print(f"{n:>6} {t_np * 1e3:>10.3f} {t_c * 1e3:>12.3f} "
                  f"{t_np / t_c:>7.1f}x  {same}")
        else:
            print(f"{n:>6} {t_np * 1e3:>10.3f} {'-':>12} {'-':>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
