"""Plots the CSV tables written by the pphi2 binary.

    python3 examples/plot_results.py OUT_DIR

Handles whichever of samples.csv, tube_scan.csv, oracles.csv and results.csv
are present and writes PNGs next to them.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def samples(df, out):
    first = df[df["sample"] == 0].pivot(index="i", columns="j", values="phi")
    fig, ax = plt.subplots()
    im = ax.imshow(first.values, aspect="auto", origin="lower", cmap="RdBu_r")
    ax.set_xlabel("x index")
    ax.set_ylabel("alpha index")
    fig.colorbar(im, label="phi")
    fig.savefig(out / "samples.png", dpi=120)


def tube(df, out):
    fig, ax = plt.subplots()
    a, b = -df["im_s"], -df["im_y"]
    for inside, marker in [(True, "o"), (False, "x")]:
        sel = df["expected_inside"] == inside
        ax.scatter(a[sel], b[sel], marker=marker, c=df["correct"][sel].map({True: "tab:green", False: "tab:red"}),
                   label="inside" if inside else "outside")
    ax.set_xlabel("-Im s")
    ax.set_ylabel("-Im y")
    ax.legend()
    fig.savefig(out / "tube_scan.png", dpi=120)


def oracles(df, out):
    fig, ax = plt.subplots()
    for name, g in df.groupby("table"):
        if g["arg2"].nunique() <= 1:
            ax.plot(g["arg"], g["value"], label=name)
    ax.set_yscale("log")
    ax.set_xlabel("argument")
    ax.legend()
    fig.savefig(out / "oracles.png", dpi=120)


def results(df, out):
    g = df.groupby("check")["pass"].agg(["sum", "count"])
    fig, ax = plt.subplots()
    ax.barh(g.index, g["count"], color="tab:red")
    ax.barh(g.index, g["sum"], color="tab:green")
    ax.set_xlabel("rows (green = pass)")
    fig.tight_layout()
    fig.savefig(out / "results.png", dpi=120)


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
    for name, plot in [("samples.csv", samples), ("tube_scan.csv", tube), ("oracles.csv", oracles), ("results.csv", results)]:
        path = out / name
        if path.exists():
            plot(pd.read_csv(path), out)
            print(f"wrote {path.with_suffix('.png')}")


if __name__ == "__main__":
    main()
