"""Figures for the report tables, rendered to files with the Agg backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {"figure.figsize": (6.0, 4.0), "font.size": 10, "axes.spines.top": False,
         "axes.spines.right": False, "savefig.dpi": 120}
K_COLORS = {1: "tab:blue", 2: "tab:orange", 3: "tab:green"}


def _save(fig, path):
    fig.tight_layout()
    # Fixed metadata keeps repeated runs byte-identical.
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_lindisc(rows, path):
    """Rounding error of the recursive procedure against the exhaustive optimum."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for k, color in K_COLORS.items():
            sel = [r for r in rows if r["k"] == k]
            if sel:
                ax.scatter([float(r["oracle"]) for r in sel], [float(r["achieved"]) for r in sel],
                           s=14, color=color, label=f"k = {k}")
        top = max([float(r["achieved"]) for r in rows] + [1.0])
        ax.plot([0, top], [0, top], color="grey", lw=0.8, ls="--", label="equal")
        ax.set_xlabel("exhaustive minimum of ||Ax - Ay||")
        ax.set_ylabel("achieved by recursive rounding")
        ax.legend(frameon=False)
        _save(fig, path)


def plot_pipeline(rows, path):
    """Bins used against the fractional optimum, per instance size."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        items = [r["items"] for r in rows]
        ax.scatter(items, [float(r["totalBins"] - r["optF"]) for r in rows], s=16,
                   marker="o", label="rounded - OPT_f")
        ax.scatter(items, [float(r["opt"] - r["optF"]) for r in rows], s=16,
                   marker="x", label="OPT - OPT_f")
        ax.set_xlabel("items")
        ax.set_ylabel("additive gap (bins)")
        ax.legend(frameon=False)
        _save(fig, path)


def plot_permutations(rows, path):
    """Best prefix discrepancy found for three permutations, by ground-set size."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar([str(r["n"]) for r in rows], [r["prefixDisc"] for r in rows], color="tab:purple")
        ax.set_xlabel("n")
        ax.set_ylabel("prefix discrepancy")
        _save(fig, path)
