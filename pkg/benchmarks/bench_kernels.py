"""Timing comparison of the compiled kernels against the numpy fallback.

Run with:  python3 benchmarks/bench_kernels.py [n]

Times each hot kernel on an n^3 grid (default 32) for both backends and
prints the per-call medians and the speedup factor.
"""

import sys
import time

import numpy as np

from diracgs import kernels
from diracgs.field import Grid, lambda_table


def timeit(fn, *args, repeat: int = 7, loops: int = 5) -> float:
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(loops):
            fn(*args)
        best.append((time.perf_counter() - t0) / loops)
    return float(np.median(best))


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 32
    grid = Grid(n, 8.0)
    rng = np.random.default_rng(0)
    m = n ** 3
    u = np.ascontiguousarray(rng.standard_normal((m, 4))
                             + 1j * rng.standard_normal((m, 4)))
    v = np.ascontiguousarray(rng.standard_normal((m, 4))
                             + 1j * rng.standard_normal((m, 4)))
    lam = lambda_table(grid, 1.0)
    kx, ky, kz = grid.modes
    mod = np.abs(rng.standard_normal(m)) + 0.1
    c0 = mod ** 2
    c2 = np.abs(rng.standard_normal(m)) + 0.1
    c1 = np.sqrt(c0 * c2) * rng.uniform(-0.9, 0.9, size=m)
    kw = np.abs(rng.standard_normal(m)) + 0.5

    cases = [
        ("abs4", lambda: kernels.abs4(u)),
        ("scale4", lambda: kernels.scale4(mod, u)),
        ("dirac_apply", lambda: kernels.dirac_apply(u, kx, ky, kz, 1.0)),
        ("split_pm", lambda: kernels.split_pm(u, kx, ky, kz, lam, 1.0)),
        ("weighted_inner", lambda: kernels.weighted_inner(lam, u, v)),
        ("weighted_norm2", lambda: kernels.weighted_norm2(lam, u)),
        ("pow_f_field", lambda: kernels.pow_f_field(kw, mod, u, 2.5)),
        ("pow_F_sum", lambda: kernels.pow_F_sum(kw, c0, c1, c2, 1.3, 2.5)),
        ("pow_g_sum", lambda: kernels.pow_g_sum(kw, c0, c1, c2, 1.3, 2.5)),
    ]

    if not kernels.has_fast():
        print("compiled backend unavailable; timing the fallback only")
    print(f"grid {n}^3 ({m} modes), times in microseconds per call")
    print(f"{'kernel':<16}{'ref':>12}{'fast':>12}{'speedup':>10}")
    for name, fn in cases:
        kernels.set_backend("ref")
        t_ref = timeit(fn) * 1e6
        if kernels.has_fast():
            kernels.set_backend("fast")
            t_fast = timeit(fn) * 1e6
            print(f"{name:<16}{t_ref:>12.1f}{t_fast:>12.1f}"
                  f"{t_ref / t_fast:>10.2f}x")
        else:
            print(f"{name:<16}{t_ref:>12.1f}{'-':>12}{'-':>10}")
    if kernels.has_fast():
        kernels.set_backend("fast")


if __name__ == "__main__":
    main()
