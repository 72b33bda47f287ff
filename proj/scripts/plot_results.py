#!/usr/bin/env python3
"""Render the experiment CSVs produced by `agma run` as semi-log error plots.

Usage: plot_results.py RESULTS_DIR [-o OUTPUT.png]

One curve per CSV (mean excess risk with its confidence band); the analytic
bound, where present, is drawn dashed in the same color.
"""

import argparse
import csv
import pathlib
import sys


def read_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    ks = [int(r["k"]) for r in rows]
    mean = [float(r["mean_excess_risk"]) for r in rows]
    half = [float(r["ci_halfwidth"]) for r in rows]
    bound = [(float(r["bound_value"]) if r["bound_value"] else None) for r in rows]
    return ks, mean, half, bound


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("results_dir", type=pathlib.Path)
    parser.add_argument("-o", "--output", type=pathlib.Path, default=None)
    args = parser.parse_args()

    csv_paths = sorted(p for p in args.results_dir.glob("*.csv"))
    if not csv_paths:
        sys.exit(f"no CSV files in {args.results_dir}")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in csv_paths:
        ks, mean, half, bound = read_csv(path)
        label = path.stem
        (line,) = ax.semilogy(ks, mean, label=label)
        lo = [max(m - h, 1e-300) for m, h in zip(mean, half)]
        hi = [m + h for m, h in zip(mean, half)]
        ax.fill_between(ks, lo, hi, alpha=0.2, color=line.get_color())
        if any(b is not None for b in bound):
            bk = [k for k, b in zip(ks, bound) if b is not None]
            bv = [b for b in bound if b is not None]
            ax.semilogy(bk, bv, "--", color=line.get_color(), alpha=0.7,
                        label=f"{label} (bound)")

    ax.set_xlabel("iteration k")
    ax.set_ylabel("mean excess risk")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()

    output = args.output or args.results_dir / "plot.png"
    fig.savefig(output, dpi=150)
    print(f"wrote {output}")


if __name__ == "__main__":
    main()
