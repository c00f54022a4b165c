#!/usr/bin/env python3
"""Scan the coefficient map over mu and emit the bifurcation diagram data.

Below the stability threshold every kept iterate sits on the attracting
fixed point, so the diagram is two smooth branches; past it the tail
iterates scatter and the scan records divergence markers.
"""

import argparse
import pathlib

from alreduce.magnetic3d import (
    STABILITY_THRESHOLD_MU,
    bifurcation_scan,
    fixed_point_coeffs,
    write_bifurcation_csv,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mu-min", type=float, default=0.0)
    parser.add_argument("--mu-max", type=float, default=0.9)
    parser.add_argument("--points", type=int, default=451)
    parser.add_argument("--n-iter", type=int, default=2000)
    parser.add_argument("--n-keep", type=int, default=32)
    parser.add_argument("--output", default="results/bifurcation.csv")
    parser.add_argument("--plot", help="optional PNG path (needs matplotlib)")
    args = parser.parse_args()

    grid = [
        args.mu_min + (args.mu_max - args.mu_min) * k / (args.points - 1)
        for k in range(args.points)
    ]
    rows = bifurcation_scan(grid, n_iter=args.n_iter, n_keep=args.n_keep)

    out = pathlib.Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="\n") as fh:
        write_bifurcation_csv(rows, fh)
    marked = sorted({r.mu for r in rows if r.diverged})
    print(f"wrote {len(rows)} rows to {out}")
    print(f"stability threshold (closed form): {STABILITY_THRESHOLD_MU:.6f}")
    if marked:
        print(f"divergence markers for mu in [{marked[0]:.4f}, {marked[-1]:.4f}]")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        clean = [r for r in rows if not r.diverged]
        fig, ax = plt.subplots(figsize=(7, 5))
        ax.scatter([r.alpha for r in clean], [r.tau0_beta for r in clean],
                   s=2, c=[r.mu for r in clean], cmap="viridis")
        mus = [m / 1000 for m in range(1, 901)]
        pts = [fixed_point_coeffs(m) for m in mus]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "r--", lw=0.8,
                label="attracting fixed point")
        ax.set_xlabel("alpha")
        ax.set_ylabel("tau0 * beta")
        ax.legend()
        fig.savefig(args.plot, dpi=150)
        print(f"plot saved to {args.plot}")


if __name__ == "__main__":
    main()
