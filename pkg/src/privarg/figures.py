"""Bar-chart renderings of experiment results, written next to the CSV."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .agents import Division, Scope, THETA_VALUES  # noqa: E402
from .experiments import MetricsRow  # noqa: E402

_DIVISION_ORDER = [d.value for d in Division]
_SCOPE_ORDER = [s.value for s in Scope]
_THETA_COLORS = ["#084081", "#2b8cbe", "#7bccc4", "#ccebc5", "#f4a582"]


def _grid_metric_figure(rows: Sequence[MetricsRow], metric: str,
                        title: str, path: Path) -> None:
    by_key = {(row.scope, row.division, row.theta): getattr(row, metric)
              for row in rows}
    fig, axes = plt.subplots(2, 2, figsize=(11, 7), sharey=True)
    width = 1.0 / (len(THETA_VALUES) + 1)
    for ax, scope in zip(axes.flat, _SCOPE_ORDER):
        for t_index, theta in enumerate(THETA_VALUES):
            values = []
            positions = []
            for d_index, division in enumerate(_DIVISION_ORDER):
                value = by_key.get((scope, division, theta))
                if value is None:
                    continue
                values.append(value)
                positions.append(d_index + (t_index - 2) * width)
            ax.bar(positions, values, width=width,
                   color=_THETA_COLORS[t_index],
                   label=f"dedication {theta}" if scope == _SCOPE_ORDER[0] else None)
        ax.set_title(f"scope: {scope}")
        ax.set_xticks(range(len(_DIVISION_ORDER)))
        ax.set_xticklabels(_DIVISION_ORDER, rotation=15)
        ax.set_ylim(0.0, 1.0)
        ax.grid(axis="y", alpha=0.3)
    fig.suptitle(title)
    fig.legend(loc="lower center", ncol=len(THETA_VALUES))
    fig.tight_layout(rect=(0.0, 0.06, 1.0, 1.0))
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_grid_figures(rows: Sequence[MetricsRow], out_dir) -> list[Path]:
    """Concealment and win-rate charts for a grid experiment run."""
    out_dir = Path(out_dir)
    paths = []
    for metric, title, name in (
            ("c_avg", "Average concealment by behavior", "exp1_concealment.png"),
            ("w_avg", "Average win rate by behavior", "exp1_winrate.png")):
        path = out_dir / name
        _grid_metric_figure(rows, metric, title, path)
        paths.append(path)
    return paths


def render_population_figure(rows: Sequence[MetricsRow], out_dir) -> Path:
    """Win rate and concealment per focal agent of a population run."""
    out_dir = Path(out_dir)
    path = out_dir / "exp2_population.png"
    labels = [row.label for row in rows]
    x = range(len(rows))
    fig, ax = plt.subplots(figsize=(9, 5))
    ax.bar([i - 0.2 for i in x], [row.w_avg for row in rows], width=0.4,
           color="#2b8cbe", label="win rate")
    ax.bar([i + 0.2 for i in x], [row.c_avg for row in rows], width=0.4,
           color="#7bccc4", label="concealment")
    ax.plot(list(x), [row.combined for row in rows], "ko--",
            label="combined")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=15)
    ax.set_ylim(0.0, 1.0)
    ax.grid(axis="y", alpha=0.3)
    ax.legend()
    ax.set_title("Population experiment, per focal agent")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
