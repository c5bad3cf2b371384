"""Wall-time comparison of the channel-iteration backends.

Builds the step channel for the baseline anti-synchronization parameters
and iterates it, timing the compiled kernel (when built), the pure-numpy
fallback, and full direct stepping for reference.

Usage: python benchmarks/bench_kernels.py [--steps N] [--repeats K]
"""

import argparse
import math
import time

import numpy as np

from collisync import _kernels_py
from collisync.engine import (
    InitialStateSpec,
    ModelParams,
    build_step_channel,
    build_step_unitaries,
    initial_carried_state,
    run_expectation_series,
)
from collisync.linalg import IDENTITY_2, PAULI_X, kron

try:
    from collisync import _kernels
except ImportError:
    _kernels = None


def build_problem():
    params = ModelParams(
        g_se=0.05, g_ss=0.03, omega1=1.0, omega2=1.1, dt_s=0.2, gamma=0.95 * math.pi / 2
    )
    channel = build_step_channel(build_step_unitaries(params), params)
    state = initial_carried_state(InitialStateSpec(), params).joint.mat.reshape(-1)
    obs = np.stack(
        [
            kron(PAULI_X, IDENTITY_2, IDENTITY_2, IDENTITY_2).T.reshape(-1),
            kron(IDENTITY_2, PAULI_X, IDENTITY_2, IDENTITY_2).T.reshape(-1),
        ]
    )
    return params, np.ascontiguousarray(channel.matrix), state, obs


def best_time(fn, repeats):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=6000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    params, channel, state, obs = build_problem()
    rows = []

    t_py, (series_py, _) = best_time(
        lambda: _kernels_py.iterate_channel(channel, state, obs, args.steps), args.repeats
    )
    rows.append(("numpy fallback", t_py, None))

    if _kernels is not None:
        t_c, (series_c, _) = best_time(
            lambda: _kernels.iterate_channel(channel, state, obs, args.steps), args.repeats
        )
        dev = np.abs(series_c - series_py).max()
        if dev > 1e-10:
            raise SystemExit(f"backends disagree by {dev:.3e}")
        rows.append(("compiled kernel", t_c, t_py / t_c))
    else:
        print("compiled kernel not built; showing fallback and direct path only")

    t_d, _ = best_time(
        lambda: run_expectation_series(InitialStateSpec(), params, args.steps),
        max(1, args.repeats // 2),
    )
    rows.append(("direct stepping", t_d, t_py / t_d))

    print(f"\nchannel iteration, {args.steps} steps, best of {args.repeats}:")
    print(f"{'backend':<16} {'time':>10} {'steps/s':>12} {'vs fallback':>12}")
    for name, t, speedup in rows:
        rel = f"{speedup:10.2f}x" if speedup else f"{'1.00x':>11}"
        print(f"{name:<16} {t * 1e3:8.1f} ms {args.steps / t:12.0f} {rel:>12}")


if __name__ == "__main__":
    main()
