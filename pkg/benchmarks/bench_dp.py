"""Backward-sweep kernel benchmark: compiled extension vs pure numpy.

Solves the same charge-sustaining problem with both kernels over a range
of horizon lengths, verifies the value functions and decision tables are
bit-identical, and reports wall times with the speedup.

Run from the repository root:

    python3 benchmarks/bench_dp.py [--repeats 3] [--grid-step 0.01]
"""

import argparse
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from phevopt.dpopt import DemandProfile, build_demand, solve
from phevopt.dpopt.solver import HAVE_COMPILED_KERNEL
from phevopt.scenario import load_scenario

ROOT = Path(__file__).resolve().parents[1]


def shipped_problem(grid_step: float):
    sc = load_scenario(ROOT / "scenarios" / "obd_single_lap.ini")
    d = build_demand(sc.cycle, sc.vp, sc.assembly.motor_map,
                     sc.assembly.drivetrain, sc.bp,
                     calibration=sc.calibration.energy_scale,
                     dt_s=sc.dp.dt_s,
                     regen_current_limit_a=sc.rule.regen_current_limit_a,
                     reference_soc=sc.dp.initial_soc)
    return d, replace(sc.dp, grid_step=grid_step)


def tiled(d: DemandProfile, laps: int) -> DemandProfile:
    return DemandProfile(np.tile(d.d_pct, laps), d.dt_s,
                         d.distance_km * laps)


def best_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repetitions per case (best-of)")
    ap.add_argument("--grid-step", type=float, default=0.01,
                    help="SOC grid resolution in percent")
    ap.add_argument("--laps", type=int, nargs="*", default=[1, 3, 10],
                    help="horizon multiples of the one-lap demand")
    args = ap.parse_args()

    base, cfg = shipped_problem(args.grid_step)
    print(f"grid: {cfg.n_states} states x {len(cfg.decisions)} decisions, "
          f"one lap = {base.n_intervals} intervals")
    if not HAVE_COMPILED_KERNEL:
        print("note: compiled kernel not built, timing the numpy kernel only")

    header = f"{'intervals':>9}  {'python':>9}  {'compiled':>9}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for laps in args.laps:
        d = tiled(base, laps)
        py_policy = solve(d, cfg, kernel="python")
        t_py = best_time(lambda: solve(d, cfg, kernel="python"), args.repeats)
        if HAVE_COMPILED_KERNEL:
            cy_policy = solve(d, cfg, kernel="cython")
            same = (np.array_equal(py_policy.cost_to_go, cy_policy.cost_to_go)
                    and np.array_equal(py_policy.decision_idx,
                                       cy_policy.decision_idx))
            if not same:
                print(f"{d.n_intervals:>9}  kernels disagree!")
                return 1
            t_cy = best_time(lambda: solve(d, cfg, kernel="cython"),
                             args.repeats)
            print(f"{d.n_intervals:>9}  {t_py:>8.4f}s  {t_cy:>8.4f}s  "
                  f"{t_py / t_cy:>7.1f}x")
        else:
            print(f"{d.n_intervals:>9}  {t_py:>8.4f}s  {'-':>9}  {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
