"""Figure rendering for report paths.

Every experiment and report CLI path writes a PNG next to its CSV/JSON
output: threshold-posterior snapshots, sweep trajectories, fold-spread
summaries, temperature fits, and per-class metric bars.  All rendering is
headless (Agg).
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import FoldReport, MetricReport, TemperatureResult, TrajectoryReport
from .pba import BisectionState


def save_posterior_figure(
    state: BisectionState, path: str | Path, title: str = ""
) -> Path:
    """Filled posterior over threshold location with a median marker."""
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.fill_between(state.grid, state.masses, color="#4878a8", alpha=0.6, lw=0)
    ax.plot(state.grid, state.masses, color="#2b4f72", lw=1.0)
    ax.axvline(state.median, color="#c23b22", lw=1.2, label=f"median {state.median:.3f}")
    ax.set_xlabel("score")
    ax.set_ylabel("probability mass")
    ax.set_xlim(state.grid[0], state.grid[-1])
    if title:
        ax.set_title(title, fontsize=10)
    ax.legend(loc="upper left", fontsize=8)
    return _save(fig, path)


def save_trajectory_figure(report: TrajectoryReport, path: str | Path) -> Path:
    """Mean distance-to-reference per annotation round, one panel per p."""
    ps = sorted(report.per_p)
    fig, axes = plt.subplots(
        1, len(ps), figsize=(3.2 * len(ps), 3.0), sharey=True, squeeze=False
    )
    for ax, p in zip(axes[0], ps):
        pts = [pt for pt in report.per_p[p] if pt.n_active > 0]
        steps = [pt.step for pt in pts]
        mean = np.array([pt.mean_dist for pt in pts])
        se = np.array([pt.se for pt in pts])
        ax.plot(steps, mean, color="#2b4f72", lw=1.2)
        ax.fill_between(steps, mean - se, mean + se, color="#4878a8", alpha=0.3, lw=0)
        ax.set_title(f"p = {p}", fontsize=10)
        ax.set_xlabel("annotation round")
    axes[0][0].set_ylabel("mean |median - reference|")
    return _save(fig, path)


def save_folds_figure(report: FoldReport, path: str | Path) -> Path:
    """Average threshold spread per completion category with min/max whiskers."""
    names = [n for n in ("All", "Complete", "Early stop", "Mixed") if n in report.categories]
    stats = [report.categories[n] for n in names]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    xs = np.arange(len(names))
    avgs = [s.avg for s in stats]
    err_lo = [s.avg - s.min for s in stats]
    err_hi = [s.max - s.avg for s in stats]
    ax.bar(xs, avgs, color="#4878a8", width=0.6)
    ax.errorbar(xs, avgs, yerr=[err_lo, err_hi], fmt="none", ecolor="#2b4f72", capsize=4)
    ax.set_xticks(xs, [f"{n}\n(n={s.n})" for n, s in zip(names, stats)])
    ax.set_ylabel("threshold spread (max - min)")
    return _save(fig, path)


def save_temperature_figure(
    results: Sequence[TemperatureResult], path: str | Path
) -> Path:
    """Fitted temperature per claim across sample sizes N."""
    fitted = [r for r in results if r.temperature is not None]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ns = sorted({r.n for r in fitted})
    for n in ns:
        ts = [r.temperature for r in fitted if r.n == n]
        ax.scatter([n] * len(ts), ts, s=14, color="#4878a8", alpha=0.6)
    if ns:
        medians = [float(np.median([r.temperature for r in fitted if r.n == n])) for n in ns]
        ax.plot(ns, medians, color="#c23b22", lw=1.2, marker="o", label="median T")
        ax.legend(fontsize=8)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N (samples per label)")
    ax.set_ylabel("fitted temperature")
    return _save(fig, path)


def save_metrics_figure(report: MetricReport, path: str | Path) -> Path:
    """Per-class F1 bars with the weighted average marked."""
    classes = sorted(report.per_class)
    f1 = [report.per_class[c].f1 for c in classes]
    fig, ax = plt.subplots(figsize=(max(4, 0.7 * len(classes)), 3.2))
    ax.bar(np.arange(len(classes)), f1, color="#4878a8", width=0.6)
    ax.axhline(
        report.weighted.f1,
        color="#c23b22",
        lw=1.2,
        ls="--",
        label=f"weighted F1 {report.weighted.f1:.2f}",
    )
    ax.set_xticks(np.arange(len(classes)), classes, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("F1")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    return _save(fig, path)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
