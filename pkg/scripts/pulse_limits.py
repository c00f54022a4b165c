#!/usr/bin/env python3
"""Tabulate the Gaussian-pulse reduction against its two non-commuting limits.

Shrinking the damping time recovers the undamped force; shrinking the pulse
width instead recovers the ideal-kick solution, which is already accelerating
before the pulse arrives.  The script writes the full table and prints the
two limit sequences at a point ahead of the pulse.
"""

import argparse
import pathlib

from alreduce.forces import GaussianPulse
from alreduce.reduction1d import (
    PulseReduction,
    gaussian_reduction,
    limit_study,
    preacceleration,
    write_limit_study_csv,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--f0", type=float, default=1.0)
    parser.add_argument("--output", default="results/pulse_limits.csv")
    args = parser.parse_args()

    scales = [0.25, 1.0 / 16.0, 1.0 / 64.0]
    t_grid = [x / 4.0 for x in range(-12, 13)]
    rows = limit_study(args.f0, [1.0] + scales, [1.0] + scales, t_grid)

    out = pathlib.Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="\n") as fh:
        write_limit_study_csv(rows, fh)
    print(f"wrote {len(rows)} rows to {out}")

    print("\nwidth -> 0 at fixed tau0 = 1, t = -1 (target: ideal kick)")
    kick = preacceleration(PulseReduction(args.f0, 1.0), -1.0)
    for eps in scales:
        accel = gaussian_reduction(PulseReduction(args.f0, 1.0, eps), -1.0)
        print(f"  eps = {eps:>8.5f}: accel = {accel:.10f}, |dev| = {abs(accel - kick):.3e}")
    print(f"  target        : {kick:.10f}")

    print("\ndamping -> 0 at fixed eps = 1, t = -1 (target: bare force)")
    bare = GaussianPulse(args.f0, 1.0).value(-1.0)
    for tau0 in scales:
        accel = gaussian_reduction(PulseReduction(args.f0, tau0, 1.0), -1.0)
        print(f"  tau0 = {tau0:>7.5f}: accel = {accel:.10f}, |dev| = {abs(accel - bare):.3e}")
    print(f"  target        : {bare:.10f}")


if __name__ == "__main__":
    main()
