"""Compare the numba and numpy backends on the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is warmed up once (compilation excluded), then timed as the best
of ``--repeat`` runs.  Also times a full 30-step Burgers rollout through the
active backend.
"""
import argparse
import time

import numpy as np

from superlab import backend_name, burgers, kernels


def best_of(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    taps = np.array([0.3, 0.5, 0.2])
    u = rng.normal(size=4096)
    a = rng.normal(size=(120, 120)) + 120 * np.eye(120)
    b = rng.normal(size=120)
    w = rng.normal(size=600)
    return {
        "correlate3 n=4096": lambda k: k["correlate3"](taps, u),
        "rollout3 n=256 steps=2000": lambda k: k["rollout3"](taps, u[:256], 2000),
        "lu_factor n=120": lambda k: k["lu_factor"](a, 1e-12),
        "lu_factor+solve n=120": lambda k: k["lu_solve"](*k["lu_factor"](a, 1e-12)[:2], b),
        "upwind_matrix n=600": lambda k: k["upwind_matrix"](w, 600.0, False),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    names = list(kernels.BACKENDS)
    print(f"{'kernel':<28}" + "".join(f"{n:>12}" for n in names) + ("   speedup" if len(names) > 1 else ""))
    for label, fn in cases(rng).items():
        times = [best_of(lambda k=kernels.BACKENDS[n]: fn(k), args.repeat) for n in names]
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    cfg = burgers.BurgersConfig.shock_forming()
    ic = burgers.shock_forming_ic(cfg.n)
    t = best_of(lambda: burgers.rollout(ic, cfg, 30), max(1, args.repeat // 2))
    print(f"burgers rollout 30 steps ({backend_name()} backend): {t * 1e3:.1f}ms")


if __name__ == "__main__":
    main()
