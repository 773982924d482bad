"""Benchmark the grid-scan backends against each other.

Runs the exhaustive equilibrium scan and a deviation-gain batch on both
the pure-Python and the compiled backend (when built) and prints wall
times plus the speedup. Invoke as:

    python benchmarks/bench_kernels.py [--caps 60] [--step 1] [--repeat 3]
"""

import argparse
import time

from eqforge._kernels import backends

PARAMS = dict(a_max=0.98, kappa=25.0, lam=0.6, floor=0.5)
COSTS = [0.0005, 0.0007, 0.0008]
BETAS = [0.0, 1.0, 1.0]


def bench_scan(module, admissible, repeat):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = module.scan_equilibria(
            admissible, COSTS, BETAS, eps_gain=1e-9, **PARAMS
        )
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def bench_gains(module, admissible, cap, repeat):
    profiles = [
        (h, m1, m2)
        for h in range(0, cap + 1, max(1, cap // 20))
        for m1 in range(0, cap + 1, max(1, cap // 20))
        for m2 in (0, cap // 2, cap)
    ]
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        for counts in profiles:
            module.deviation_gains(list(counts), admissible, COSTS, BETAS, **PARAMS)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, len(profiles)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--caps", type=int, default=60)
    parser.add_argument("--step", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    admissible = [list(range(0, args.caps + 1, args.step))] * 3
    if admissible[0][-1] != args.caps:
        for a in admissible:
            a.append(args.caps)
    n_profiles = len(admissible[0]) ** 3
    per_profile = sum(len(a) for a in admissible)
    print(
        f"grid: caps {args.caps}, step {args.step} -> {n_profiles} profiles, "
        f"{n_profiles * per_profile} candidate evaluations"
    )

    found = backends()
    times = {}
    for name, module in found:
        dt, result = bench_scan(module, admissible, args.repeat)
        times[name] = dt
        print(f"scan_equilibria [{name:7s}]  {dt*1000:10.1f} ms   equilibria: {result}")
    if "python" in times and "cython" in times:
        print(f"scan speedup: {times['python'] / times['cython']:.1f}x")

    gains_times = {}
    for name, module in found:
        dt, count = bench_gains(module, admissible, args.caps, args.repeat)
        gains_times[name] = dt
        print(f"deviation_gains [{name:7s}]  {dt*1000:10.1f} ms   ({count} profiles)")
    if "python" in gains_times and "cython" in gains_times:
        print(f"gains speedup: {gains_times['python'] / gains_times['cython']:.1f}x")


if __name__ == "__main__":
    main()
