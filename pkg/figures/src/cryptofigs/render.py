"""The six figure builders and the render() entry point.

Rendering is a pure function of the input CSVs: the Agg backend is
forced, SVG ids are salted with a constant, and per-format timestamp
metadata is suppressed, so identical inputs give identical bytes. All
inputs are read (and therefore validated) before the output file is
opened.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "cryptofigs"

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Patch

from .figspec import FigureSpec
from .schema import (
    CLASS_LABELS,
    HISTOGRAM,
    RESCALE,
    SUMMARY,
    TRAJECTORY,
    finite,
)

__all__ = ["render", "build_figure"]


def render(spec: FigureSpec) -> Path:
    """Build the figure and write it to spec.output; returns the path."""
    fig = build_figure(spec)
    out = Path(spec.output)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, dpi=spec.dpi, metadata=_metadata(out.suffix))
    finally:
        plt.close(fig)
    return out


def build_figure(spec: FigureSpec):
    """Build and return the matplotlib Figure without saving it."""
    return _BUILDERS[spec.kind](spec)


def _metadata(suffix: str):
    # suppress embedded timestamps so reruns are byte-identical
    if suffix == ".png":
        return {"Software": "cryptofigs"}
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".pdf":
        return {"CreationDate": None}
    return None


# ---------------------------------------------------------------------------
# builders

def _scatter_ar(spec: FigureSpec):
    rows = TRAJECTORY.read(spec.inputs[0])
    t_last = max(row["t"] for row in rows)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for label in CLASS_LABELS:
        pts = [(r["a"], r["r"]) for r in rows
               if r["t"] == t_last and r["class"] == label]
        if not pts:
            continue
        a, r = zip(*pts)
        ax.scatter(a, r, s=16, color=spec.colors[label], label=label,
                   edgecolors="none", alpha=0.85)
    ax.set_xlabel("adoption probability a")
    ax.set_ylabel("expected return r")
    ax.set_title(f"final configuration (t = {t_last})")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _centroid_traj(spec: FigureSpec):
    rows = SUMMARY.read(spec.inputs[0])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for label in CLASS_LABELS:
        path = [(row[f"a_mean_{label}"], row[f"r_mean_{label}"])
                for row in rows
                if not math.isnan(row[f"a_mean_{label}"])]
        if not path:
            continue
        a, r = zip(*path)
        color = spec.colors[label]
        ax.plot(a, r, color=color, linewidth=1.2, label=label)
        ax.plot(a[0], r[0], marker="o", mfc="none", mec=color, ms=7)
        ax.plot(a[-1], r[-1], marker="s", color=color, ms=6)
    ax.set_xlabel("class mean adoption")
    ax.set_ylabel("class mean expected return")
    ax.set_title("centre-of-mass trajectories (o start, square end)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _rtot_series(spec: FigureSpec):
    rows = SUMMARY.read(spec.inputs[0])
    t = [row["t"] for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(t, [row["r_tot"] for row in rows], color="black", linewidth=1.3)
    ax.set_xlabel("sweep t")
    ax.set_ylabel("total expected return R_tot")
    ax2 = ax.twinx()
    ax2.fill_between(t, [row["accepted_moves"] for row in rows],
                     color="0.7", alpha=0.35, linewidth=0.0, step="mid")
    ax2.set_ylabel("accepted moves per sweep", color="0.45")
    ax2.tick_params(axis="y", colors="0.45")
    fig.tight_layout()
    return fig


def _phase_panels(spec: FigureSpec):
    rows = HISTOGRAM.read(spec.inputs[0])
    cells: dict[tuple[float, float], list[dict]] = {}
    for row in rows:
        cells.setdefault((row["beta1"], row["beta2"]), []).append(row)
    n = len(cells)
    ncols = math.ceil(math.sqrt(n))
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(nrows, ncols, squeeze=False,
                             figsize=(3.4 * ncols, 2.7 * nrows))
    flat = axes.ravel()
    for ax, ((b1, b2), cell_rows) in zip(flat, cells.items()):
        for label in CLASS_LABELS:
            bins = [r for r in cell_rows if r["class"] == label]
            if not bins or not finite([r["mean_nonadoption"] for r in bins]):
                continue
            centers = [(r["bin_lo"] + r["bin_hi"]) / 2.0 for r in bins]
            widths = [r["bin_hi"] - r["bin_lo"] for r in bins]
            ax.bar(centers, [r["freq"] for r in bins], width=widths,
                   color=spec.colors[label], alpha=0.55, label=label,
                   edgecolor="none")
        ax.set_title(f"beta1={b1:g}, beta2={b2:g}", fontsize=9)
        ax.set_xlabel("1 - a", fontsize=8)
        ax.set_ylabel("freq", fontsize=8)
        ax.tick_params(labelsize=7)
    for ax in flat[n:]:
        ax.set_visible(False)
    handles = [Patch(color=spec.colors[label], alpha=0.55, label=label)
               for label in CLASS_LABELS]
    fig.legend(handles=handles, loc="lower right", fontsize=8, ncol=2)
    fig.tight_layout()
    return fig


def _rescale_curve(spec: FigureSpec):
    rows = RESCALE.read(spec.inputs[0])
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    methods = []
    for row in rows:
        if row["method"] not in methods:
            methods.append(row["method"])
    for method in methods:
        pts = sorted(
            (row["beta"], row["beta_prime"])
            for row in rows if row["method"] == method
        )
        b, bp = zip(*pts)
        ax.plot(b, bp, marker="o", ms=4, linewidth=1.2, label=method)
    ax.set_xlabel("beta (source ecosystem)")
    ax.set_ylabel("beta' (target ecosystem)")
    ax.set_title("attitude rescaling curve")
    if len(methods) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _compare_bars(spec: FigureSpec):
    first = TRAJECTORY.read(spec.inputs[0])
    second = TRAJECTORY.read(spec.inputs[1])

    def class_means(rows):
        t_last = max(row["t"] for row in rows)
        out = []
        for label in CLASS_LABELS:
            vals = [r["a"] for r in rows
                    if r["t"] == t_last and r["class"] == label]
            out.append(sum(vals) / len(vals) if vals else math.nan)
        return out

    m1, m2 = class_means(first), class_means(second)
    x = np.arange(len(CLASS_LABELS))
    colors = [spec.colors[label] for label in CLASS_LABELS]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.bar(x - 0.19, m1, width=0.38, color=colors, edgecolor="black",
           linewidth=0.6)
    ax.bar(x + 0.19, m2, width=0.38, color=colors, edgecolor="black",
           linewidth=0.6, hatch="//", alpha=0.65)
    ax.set_xticks(x, CLASS_LABELS, fontsize=8)
    ax.set_ylabel("class mean adoption")
    ax.set_ylim(0.0, 1.0)
    ax.legend(handles=[
        Patch(facecolor="0.85", edgecolor="black", label=spec.labels[0]),
        Patch(facecolor="0.85", edgecolor="black", hatch="//",
              label=spec.labels[1]),
    ], fontsize=8)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "scatter_ar": _scatter_ar,
    "centroid_traj": _centroid_traj,
    "rtot_series": _rtot_series,
    "phase_panels": _phase_panels,
    "rescale_curve": _rescale_curve,
    "compare_bars": _compare_bars,
}
