"""Plot the CSV tables written by reproduce_figures.py (needs matplotlib and pandas).

    python3 scripts/plot_figures.py --results results
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def plot_fig1(path: Path, out: Path):
    df = pd.read_csv(path)
    panels = sorted(df.panel.unique())
    fig, axes = plt.subplots(1, len(panels), figsize=(4 * len(panels), 3.5), sharey=True)
    for ax, panel in zip(axes, panels):
        sub = df[df.panel == panel]
        for method, grp in sub.groupby("method"):
            ax.errorbar(grp.rho, grp.mean_stat, yerr=grp.sd_stat, marker="o", ms=3, label=method)
        ax.plot([-1, 1], [-1, 1], color="grey", lw=0.5, ls="--")
        ax.set_xlim(sub.rho.min() - 0.05, sub.rho.max() + 0.05)
        ax.set_title(f"{panel}: {sub.setting.iloc[0]}")
        ax.set_xlabel("rho")
    axes[0].set_ylabel("mean statistic")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(out / "fig1.png", dpi=150)


def plot_power(path: Path, out: Path):
    df = pd.read_csv(path)
    rows = sorted(df.row.unique())
    rhos = sorted(df.rho.unique())
    fig, axes = plt.subplots(len(rows), len(rhos), figsize=(4 * len(rhos), 2.6 * len(rows)), sharey=True, squeeze=False)
    for i, row in enumerate(rows):
        for j, rho in enumerate(rhos):
            ax = axes[i, j]
            sub = df[(df.row == row) & (df.rho == rho)]
            for method, grp in sub.groupby("method"):
                ax.plot(grp.n, grp.power, marker="o", ms=3, label=method)
            if rho == 0:
                ax.axhline(0.05, color="grey", lw=0.5, ls="--")
            ax.set_ylim(-0.02, 1.02)
            ax.set_title(f"row {row}, rho = {rho:g}", fontsize=9)
    axes[0, 0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out / f"{path.stem}.png", dpi=150)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--results", default="results")
    args = ap.parse_args()
    res = Path(args.results)
    if (res / "fig1.csv").exists():
        plot_fig1(res / "fig1.csv", res)
    for name in ("fig3.csv", "fig4.csv"):
        if (res / name).exists():
            plot_power(res / name, res)


if __name__ == "__main__":
    main()
