"""Compare the compiled stencil kernels against the numpy fallback.

Times the shifted-operator evaluation on representative grids, then a full
implicit time step (CG solve included) on the 2D reference size.

Run:  python3 benchmarks/bench_stencil.py [--repeats N]
"""

import argparse
import time

import numpy as np

from obstacleheat import _stencil_np
from obstacleheat.discretize import Field, OperatorSpec, build_grid
from obstacleheat.evolve import SolveConfig, step
from obstacleheat.geometry import RegionMask

try:
    from obstacleheat import _stencil_cy
except ImportError:
    _stencil_cy = None

CASES = [
    ("1d 1e6 cells", (1_000_000,)),
    ("2d 512x512", (512, 512)),
    ("3d 64x64x64", (64, 64, 64)),
]


def call(impl, out, u, kill, lam, inv_h2, alpha, beta):
    fns = {
        1: impl.apply_shifted_1d,
        2: impl.apply_shifted_2d,
        3: impl.apply_shifted_3d,
    }
    fns[u.ndim](out, u, kill, lam, *inv_h2, alpha, beta)


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernels(repeats):
    rng = np.random.default_rng(0)
    print(f"{'grid':>14} {'numpy':>12} {'cython':>12} {'speedup':>9}")
    for name, shape in CASES:
        u = rng.normal(size=shape)
        out = np.empty_like(u)
        kill = (rng.random(shape) < 0.3).astype(np.uint8)
        inv_h2 = tuple(float(c * c) for c in shape)
        args = (out, u, kill, 1e3, inv_h2, 1.0, 2.5e-4)
        t_np = best_of(lambda: call(_stencil_np, *args), repeats)
        if _stencil_cy is None:
            print(f"{name:>14} {t_np * 1e3:>10.3f}ms {'-':>12} {'-':>9}")
            continue
        t_cy = best_of(lambda: call(_stencil_cy, *args), repeats)
        print(f"{name:>14} {t_np * 1e3:>10.3f}ms {t_cy * 1e3:>10.3f}ms "
              f"{t_np / t_cy:>8.1f}x")


def bench_step(repeats):
    grid = build_grid((0.0, 0.0), (1.0, 1.0), (256, 256))
    x = grid.cell_centers()
    kill = (x[..., 0] - 0.5) ** 2 + (x[..., 1] - 0.5) ** 2 < 0.09
    op = OperatorSpec(grid, 1e4, RegionMask(grid, kill))
    u0 = np.cos(np.pi * x[..., 0]) * np.cos(np.pi * x[..., 1])
    cfg = SolveConfig(lam=1e4, dt=2.5e-5)
    t = best_of(lambda: step(Field(grid, u0), op, cfg), repeats)
    print(f"\nimplicit step, 256x256, lam=1e4 (cold CG): {t * 1e3:.2f}ms "
          f"per step")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5,
                        help="best-of-N timing (default 5)")
    args = parser.parse_args()
    if _stencil_cy is None:
        print("compiled extension not available; timing numpy only\n")
    bench_kernels(args.repeats)
    bench_step(args.repeats)


if __name__ == "__main__":
    main()
