#!/usr/bin/env python3
"""Time the RK4 stepping kernels: numba JIT against the pure-numpy fallback.

Both backends run the same loop factories from ``frgeo.kernels`` on the same
unit-speed geodesic data, so the comparison is apples to apples.  JIT
compilation is triggered before any clock starts, the reported figure is the
best of ``--repeats`` runs, and positions are cross-checked between backends
before printing.

    python3 benchmarks/bench_kernels.py --n 5 --step 2e-5
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from frgeo import SimplexPoint, boundary_touch_time, ellipsoid_tangent
from frgeo import kernels


def geodesic_data(n: int, seed: int):
    rng = np.random.default_rng(seed)
    raw = rng.gamma(shape=2.0, scale=1.0, size=n + 1)
    probs = raw / raw.sum()
    probs = 0.98 * probs + 0.02 / (n + 1)
    p0 = SimplexPoint(probs[:n])
    v0 = ellipsoid_tangent(p0, rng.standard_normal(n))
    return p0, v0


def best_time(fn, args, repeats: int) -> tuple[float, tuple]:
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5, help="free simplex dimension")
    ap.add_argument("--step", type=float, default=2e-5, help="RK4 step size")
    ap.add_argument(
        "--t-end", type=float, default=1.2, help="horizon (capped below exit)"
    )
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    p0, v0 = geodesic_data(args.n, args.seed)
    horizon = min(args.t_end, 0.9 * boundary_touch_time(p0, v0))
    n_steps = int(np.ceil(horizon / args.step))
    eps = 1e-9

    coupled_args = (p0.theta, v0.v, args.step, horizon, eps)
    decoupled_args = (p0.full, v0.full, args.step, horizon, eps)
    cases = [
        ("coupled", kernels.rk4_coupled_numpy, kernels.rk4_coupled_jit, coupled_args),
        (
            "decoupled",
            kernels.rk4_decoupled_numpy,
            kernels.rk4_decoupled_jit,
            decoupled_args,
        ),
    ]

    print(
        f"n = {args.n}, horizon = {horizon:.4f}, step = {args.step:g} "
        f"({n_steps} steps), best of {args.repeats}"
    )
    if not kernels.HAVE_NUMBA:
        print("numba not importable: timing the numpy fallback only")
    header = f"{'kernel':<10} {'numpy':>11} {'numba':>11} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, numpy_fn, jit_fn, call_args in cases:
        t_np, out_np = best_time(numpy_fn, call_args, args.repeats)
        if jit_fn is None:
            print(f"{name:<10} {t_np:>10.4f}s {'-':>11} {'-':>9}")
            continue
        jit_fn(*call_args)  # compile before timing
        t_jit, out_jit = best_time(jit_fn, call_args, args.repeats)
        drift = float(np.max(np.abs(out_np[1] - out_jit[1])))
        if drift > 1e-12:
            raise SystemExit(f"{name}: backends disagree by {drift:.3e}")
        print(f"{name:<10} {t_np:>10.4f}s {t_jit:>10.4f}s {t_np / t_jit:>8.1f}x")


if __name__ == "__main__":
    main()
