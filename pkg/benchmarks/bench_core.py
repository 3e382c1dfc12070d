#!/usr/bin/env python3
"""Benchmark the compiled convolution core against the pure-NumPy fallback.

Usage: python benchmarks/bench_core.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from volterra_radii import _core_py

try:
    from volterra_radii import _core
except ImportError:
    _core = None


def best_time(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _core is None:
        print("compiled core not available; showing the fallback only")

    rng = np.random.default_rng(0)
    print(f"{'case':<28} {'python':>10} {'cython':>10} {'speedup':>9}")
    for name, n, d in (
        ("resolvent n=256 d=1", 256, 1),
        ("resolvent n=256 d=4", 256, 4),
        ("resolvent n=1024 d=2", 1024, 2),
        ("resolvent n=2048 d=1", 2048, 1),
    ):
        coeffs = 0.3 * (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d)))
        t_py = best_time(_core_py.resolvent_recursion, (coeffs,), args.repeat)
        if _core is None:
            print(f"{name:<28} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>9}")
            continue
        t_cy = best_time(_core.resolvent_recursion, (coeffs,), args.repeat)
        assert np.allclose(
            _core.resolvent_recursion(coeffs), _core_py.resolvent_recursion(coeffs)
        )
        print(f"{name:<28} {t_py * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms {t_py / t_cy:>8.1f}x")

    for name, n, d in (
        ("convolution n=256 d=2", 256, 2),
        ("convolution n=1024 d=2", 1024, 2),
    ):
        a = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
        b = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
        t_py = best_time(_core_py.conv_triangular, (a, b), args.repeat)
        if _core is None:
            print(f"{name:<28} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>9}")
            continue
        t_cy = best_time(_core.conv_triangular, (a, b), args.repeat)
        print(f"{name:<28} {t_py * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms {t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
