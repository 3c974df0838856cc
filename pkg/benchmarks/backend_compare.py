#!/usr/bin/env python3
"""Calibrate the cost model under each available backend and compare.

The whole point of the calibration layer is that m, c, and therefore
N_min are properties of the *host execution path*, not of the problem:
a compiled kernel has a radically different overhead-to-section cost
profile than vectorized interpreter calls.  This script makes that
concrete by running the same sweep under both backends and printing the
resulting models side by side.

Usage:
    python3 benchmarks/backend_compare.py
    python3 benchmarks/backend_compare.py --corpus 3 --min-loops 2000
"""

import argparse
import logging
import sys

from multisection import (
    FitError,
    SweepConfig,
    WallClockRunner,
    available_backends,
    calibrate,
    corpus,
    solve,
)

logger = logging.getLogger("backend_compare")


def parse_args(argv):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus", type=int, default=3, metavar="INDEX",
                        help="benchmark problem number, 1-based (default 3)")
    parser.add_argument("--min-loops", type=int, default=1000,
                        help="loop iterations per timed sample (default 1000)")
    parser.add_argument("--n-step", type=int, default=4,
                        help="stride through N in [2, 250] (default 4)")
    parser.add_argument("--verbose", action="store_true")
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    problem = corpus()[args.corpus - 1]
    n_values = tuple(range(2, 251, args.n_step))
    config = SweepConfig(problem=problem, n_values=n_values,
                         min_loops=args.min_loops)

    print(f"problem: {problem.id} on "
          f"[{problem.bracket.lo:g}, {problem.bracket.hi:g}]")
    print(f"sweep: N in [2, 250] step {args.n_step}, "
          f"{args.min_loops} loops per sample")
    print()
    header = (f"{'backend':>8}  {'m (s)':>11}  {'c (s)':>11}  {'R=c/m':>9}  "
              f"{'N_min':>5}  {'pred ratio':>10}  {'meas ratio':>10}  {'r²':>6}")
    print(header)
    print("-" * len(header))

    for backend in available_backends():
        runner = WallClockRunner(backend=backend)
        # absorb one-time compilation before any clock starts
        solve(problem, backend=backend)
        try:
            result = calibrate(problem, config, runner)
        except FitError as exc:
            print(f"{backend:>8}  unusable fit on this host: {exc}")
            continue
        report = result.report
        print(f"{backend:>8}  {result.fit.m:11.3e}  {result.fit.c:11.3e}  "
              f"{report.R:9.1f}  {report.n_min_integer:5d}  "
              f"{report.rel_eff_integer:10.3f}  {result.measured_ratio:10.3f}  "
              f"{result.fit.r_squared:6.3f}")

    print()
    print("N_min and the predicted ratio follow the host cost profile; "
          "expect them to differ across backends and machines.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
