#!/usr/bin/env python3
"""Plot empirical/predicted ratios from `twistlab moment --csv` output."""
import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--output", default="ratios.png")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.csv:
        with open(path, newline="") as f:
            rows = [r for r in csv.DictReader(f) if r["ratio"] not in ("", "nan")]
        xs = [float(r["X"]) for r in rows]
        ys = [float(r["ratio"]) for r in rows]
        ax.plot(xs, ys, marker="o", label=path)
    ax.axhline(1.0, color="grey", lw=0.8, ls="--")
    ax.set_xscale("log")
    ax.set_xlabel("X")
    ax.set_ylabel("empirical / predicted")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
