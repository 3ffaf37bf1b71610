"""Figure rendering for reports: per-instance ratio charts and the
threshold distribution.  Files only (Agg backend), written next to the
delimited output when the CLI is asked to plot."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import RatioReport
from .numerics import DistributionSpec, cdf_X_array


def plot_ratio_report(report: RatioReport, path) -> Path:
    """One marker per instance ratio, with the worst case highlighted."""
    path = Path(path)
    labels = [r.instance for r in report.records]
    ratios = [float(r.ratio) if r.ratio is not None else np.nan for r in report.records]
    xs = np.arange(len(ratios))

    fig, ax = plt.subplots(figsize=(max(6.0, 0.28 * len(ratios)), 4.0))
    ax.plot(xs, ratios, "o-", ms=4, lw=1, color="#1f77b4")
    worst = report.worst_ratio
    if worst is not None:
        ax.axhline(float(worst), color="#d62728", lw=1, ls="--",
                   label=f"worst ratio {float(worst):.6g}")
        ax.legend(loc="best", fontsize=8)
    if any(r.unbounded for r in report.records):
        ax.set_title(f"{report.algorithm} (some ratios unbounded)")
    else:
        ax.set_title(report.algorithm)
    ax.set_xlabel("instance")
    ax.set_ylabel("opt / gain")
    if len(labels) <= 24:
        ax.set_xticks(xs)
        ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_distribution(dist: DistributionSpec, path) -> Path:
    """Density pieces, atoms, and the CDF of the threshold distribution."""
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))

    x1 = np.linspace(0.5 + 1e-9, 2 / 3 - 1e-9, 400)
    x2 = np.linspace(2 / 3 + 1e-9, 1.0, 400)
    ax1.plot(x1, dist.p_half / x1, color="#1f77b4", lw=1.5)
    ax1.plot(x2, dist.p_half * (1 + np.log(2 - x2)) / (2 * x2), color="#1f77b4", lw=1.5)
    for atom_x, mass in ((0.5, dist.p_half), (2 / 3, dist.p_two_thirds)):
        ax1.vlines(atom_x, 0, mass, color="#d62728", lw=2)
        ax1.plot([atom_x], [mass], "v", color="#d62728", ms=6)
    ax1.set_title("threshold density (bars: atom masses)")
    ax1.set_xlim(0.45, 1.02)
    ax1.set_ylim(0, None)
    ax1.grid(alpha=0.3)

    grid = np.linspace(0.0, 1.0, 1001)
    ax2.plot(grid, cdf_X_array(dist, grid), color="#1f77b4", lw=1.5)
    ax2.set_title("threshold CDF")
    ax2.set_ylim(0, 1.02)
    ax2.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
