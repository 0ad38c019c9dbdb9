"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call includes JIT compilation (or a cache load); it is
reported separately and excluded from the steady-state timings.
"""

import argparse
import time

import numpy as np

from nobeling import _kernels
from nobeling.lines import all_lines_of_height


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    _kernels.uf_labels(np.ones((2, 2), dtype=bool), use_numba=True)
    _kernels.pair_array(np.arange(4), np.arange(4), use_numba=True)
    print(f"first numba call (compile or cache load): {time.perf_counter() - t0:.3f}s")

    print(f"{'kernel':<28}{'numpy':>10}{'numba':>10}{'speedup':>10}")
    for dim, r in [(3, 32), (3, 64), (4, 16), (4, 24), (4, 32)]:
        free = rng.random((r,) * dim) < 0.6
        a = _kernels.uf_labels(free, use_numba=False)
        b = _kernels.uf_labels(free, use_numba=True)
        assert np.array_equal(a, b)
        tn = best_of(lambda: _kernels.uf_labels(free, use_numba=False), args.repeat)
        tj = best_of(lambda: _kernels.uf_labels(free, use_numba=True), args.repeat)
        print(f"{f'union-find n={dim} r={r}':<28}{tn:>10.4f}{tj:>10.4f}{tn / tj:>10.1f}")

    for height in (4, 8):
        axes, cols = all_lines_of_height(height, 4)
        assert np.array_equal(
            _kernels.line_indices(axes, cols, 4, use_numba=False),
            _kernels.line_indices(axes, cols, 4, use_numba=True),
        )
        tn = best_of(lambda: _kernels.line_indices(axes, cols, 4, use_numba=False), args.repeat)
        tj = best_of(lambda: _kernels.line_indices(axes, cols, 4, use_numba=True), args.repeat)
        label = f"line index h={height} ({len(axes)})"
        print(f"{label:<28}{tn:>10.4f}{tj:>10.4f}{tn / tj:>10.1f}")


if __name__ == "__main__":
    main()
