"""Time the compiled kernels against their NumPy fallbacks.

Both backends are imported directly, so one process benchmarks them side
by side on workloads shaped like the pipeline's real inner loops. Each
case also cross-checks that the two implementations agree before timing.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from scenex._kernels import METHOD_WARD, pure

try:
    from scenex._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats: int) -> float:
    """Smallest wall time of ``repeats`` calls, in seconds."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _check(name: str, got, want) -> None:
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    if got.shape != want.shape or not np.allclose(got, want, atol=1e-9, rtol=0.0):
        raise AssertionError(f"{name}: backends disagree")


def _cases(rng: np.random.Generator):
    """Yield (label, runner) pairs; runner(impl) returns a comparable array."""

    def closest_pair_case(n: int):
        ex, ey = rng.normal(size=n).cumsum(), rng.normal(size=n).cumsum()
        cx, cy = rng.normal(size=n).cumsum() + 3.0, rng.normal(size=n).cumsum()

        def runner(impl):
            return np.array(impl.closest_pair(ex, ey, cx, cy))

        return f"closest_pair  n={n}x{n}", runner

    def jacobi_case(d: int):
        x = rng.normal(size=(4 * d, d))
        sym = x.T @ x / (4 * d)

        def runner(impl):
            vals, vecs = impl.jacobi_eigh(sym)
            return np.sort(vals)

        return f"jacobi_eigh   d={d}", runner

    def lloyd_case(n: int, d: int, k: int):
        pts = rng.normal(size=(n, d))
        cent = pts[:k].copy()

        def runner(impl):
            assign, _, _ = impl.lloyd(pts, cent)
            return assign

        return f"lloyd         n={n} d={d} k={k}", runner

    def lance_case(n: int):
        pts = rng.normal(size=(n, 8))
        diff = pts[:, None, :] - pts[None, :, :]
        d2 = (diff**2).sum(axis=2)
        sizes = np.ones(n, dtype=np.int64)

        def runner(impl):
            return impl.lance_williams(d2, sizes, METHOD_WARD)

        return f"lance_williams n={n} ward", runner

    yield closest_pair_case(400)
    yield closest_pair_case(1500)
    yield jacobi_case(12)
    yield jacobi_case(96)
    yield lloyd_case(2000, 8, 12)
    yield lance_case(200)
    yield lance_case(400)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timed runs per case (best is kept)")
    args = parser.parse_args()

    if _core is None:
        print("compiled backend not built; install the package with a C compiler first")
        return 1

    rng = np.random.default_rng(0)
    header = f"{'workload':<28} {'pure [ms]':>10} {'compiled [ms]':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, runner in _cases(rng):
        _check(label, runner(_core), runner(pure))
        t_pure = best_of(lambda: runner(pure), args.repeats)
        t_core = best_of(lambda: runner(_core), args.repeats)
        print(f"{label:<28} {t_pure * 1e3:>10.2f} {t_core * 1e3:>14.2f} {t_pure / t_core:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
