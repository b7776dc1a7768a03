"""Compare the compiled path kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernel.py [--paths N] [--repeat R]

Each case simulates the same paths with both backends from the same Philox
stream, checks that the results are bit-identical and reports time per path.
"""

import argparse
import time

import numpy as np

from levy_orthant import LevyModel, check_conditions, reserve_process
from levy_orthant.model import ExpAlong, GaussianJump, JumpComponent
from levy_orthant.sim import chunk_stream, tilt_model
from levy_orthant.sim import _backend
from levy_orthant.sim._spec import MODE_CRUDE, MODE_IMPORTANCE, build_spec


def cases():
    bm = LevyModel([-1.0, -1.0], np.eye(2))
    jd = LevyModel([-1.0, -0.5], [[1.0, 0.3], [0.3, 0.5]], JumpComponent(0.7, ExpAlong([1.0, 0.5], 2.0)))
    gj = LevyModel([-1.0, -1.0], 0.5 * np.eye(2), JumpComponent(2.0, GaussianJump([0.2, 0.1], [[0.3, 0.1], [0.1, 0.2]])))
    cl = reserve_process([1.0], [1.0], 1.0, 2.0)
    out = []
    for name, m, s, delta in (("bm", bm, 2.0, 0.01), ("bm+exp jumps", jd, 2.0, 0.01), ("bm+gauss jumps", gj, 2.0, 0.01)):
        g = np.ones(m.dim)
        out.append((f"{name} crude", build_spec(m, s * g, delta, 1000, MODE_CRUDE)))
        lam = np.asarray(check_conditions(m, g).normal)
        out.append((f"{name} IS", build_spec(tilt_model(m, lam), s * g, delta, 100_000, MODE_IMPORTANCE, lam=lam)))
    lam = np.asarray(check_conditions(cl, [1.0]).normal)
    out.append(("ruin IS u=5", build_spec(tilt_model(cl, lam), [5.0], 1.0, 1000, MODE_IMPORTANCE, lam=lam)))
    return out


def timed(fn, spec, n, repeat):
    best, res = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = fn(chunk_stream(0, 0), n, spec)
        best = min(best, time.perf_counter() - t0)
    return best, tuple(res)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _backend.compiled_run_paths is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    print(f"{'case':<22}{'compiled us/path':>18}{'python us/path':>16}{'speedup':>9}  identical")
    for name, spec in cases():
        # the fallback is slow: time it, and check identity, on a tenth of the paths
        n_py = max(1, args.paths // 10)
        _, res_c = timed(_backend.compiled_run_paths, spec, n_py, 1)
        t_p, res_p = timed(_backend.fallback_run_paths, spec, n_py, 1)
        t_full, _ = timed(_backend.compiled_run_paths, spec, args.paths, args.repeat)
        us_c = 1e6 * t_full / args.paths
        us_p = 1e6 * t_p / n_py
        print(f"{name:<22}{us_c:>18.1f}{us_p:>16.1f}{us_p / us_c:>8.0f}x  {res_c == res_p}")


if __name__ == "__main__":
    main()
