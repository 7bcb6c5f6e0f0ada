"""Compare the numba and numpy kernel paths.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call compiles (or loads the on-disk cache); it is run once
as warm-up and excluded from the timings.
"""
import argparse
import time

import numpy as np

from qqbell import kernels, states
from qqbell._accel import HAVE_NUMBA
from qqbell.optimize import OptimizerConfig, maximize_e, start_points


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--batch", type=int, default=40_000, help="3x3 matrices per Jacobi batch")
    ap.add_argument("--states", type=int, default=20, help="states for the optimizer benchmark")
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    rng = np.random.default_rng(0)

    A = rng.normal(size=(args.batch, 3, 8))
    M = A @ np.swapaxes(A, 1, 2)
    f = states.decompose(states.random_state(rng))
    x0 = start_points(64, 0)
    fs = [states.decompose(states.random_state(rng)) for _ in range(args.states)]

    cases = {
        f"jacobi_eigh ({args.batch} matrices)": lambda b: kernels.jacobi_eigh(M, backend=b)[0],
        "nelder_mead_starts (64 starts)": lambda b: kernels.nelder_mead_starts(f.r, f.T, x0, backend=b)[1],
        f"maximize_e ({args.states} states)": lambda b: [
            maximize_e(g, OptimizerConfig(), backend=b).e_max for g in fs
        ],
    }

    print(f"{'kernel':40s} " + " ".join(f"{b:>10s}" for b in backends) + "    speedup")
    for name, fn in cases.items():
        row, outs = [], []
        for b in backends:
            fn(b)  # warm-up / compile
            t, out = best_of(lambda: fn(b), args.repeat)
            row.append(t)
            outs.append(np.asarray(out))
        agree = all(np.allclose(o, outs[0], atol=1e-9) for o in outs)
        speed = f"{row[0] / row[-1]:8.1f}x" if len(row) > 1 else "       -"
        flag = "" if agree else "  (results differ!)"
        print(f"{name:40s} " + " ".join(f"{t * 1e3:8.1f}ms" for t in row) + f"  {speed}{flag}")


if __name__ == "__main__":
    main()
