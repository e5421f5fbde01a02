"""Figure rendering for the bench harness.

Renders per-mesh embedding rate and vertex utilization charts next to
the delimited output so a bench run leaves both machine- and
human-readable artifacts.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _grouped_bars(ax, reports, value_fn, ylabel):
    names = sorted({r.mesh for r in reports})
    strategies = sorted({r.strategy for r in reports})
    width = 0.8 / max(len(strategies), 1)
    for si, strat in enumerate(strategies):
        by_name = {r.mesh: value_fn(r) for r in reports if r.strategy == strat}
        xs = [i + si * width for i in range(len(names))]
        ys = [by_name.get(nm, 0.0) for nm in names]
        ax.bar(xs, ys, width=width, label=strat)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(names))])
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel(ylabel)
    ax.legend()


def render_bench_figures(reports, out_dir):
    """Write embedding-rate and utilization bar charts; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for fname, value_fn, ylabel, title in (
        ("bench_er.png", lambda r: r.er_bpv, "ER (bpv)", "Net embedding rate"),
        (
            "bench_utilization.png",
            lambda r: 100.0 * r.utilization,
            "vertex utilization (%)",
            "Embedding-set share of vertices",
        ),
    ):
        fig, ax = plt.subplots(figsize=(max(6, len(reports) * 0.5), 4))
        _grouped_bars(ax, reports, value_fn, ylabel)
        ax.set_title(title)
        fig.tight_layout()
        path = out_dir / fname
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
