"""Figure rendering for evaluation reports (headless matplotlib)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .report import OUTCOMES, EvalReport


def render_figures(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """One bar chart for metrics, one grouped chart for tallies; skips empties."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if report.metrics:
        names = sorted(report.metrics)
        fig, ax = plt.subplots(figsize=(max(4, len(names) * 1.2), 3.5))
        ax.bar(names, [report.metrics[n] for n in names], color="#4878a8")
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("value")
        ax.set_title(f"{report.dimension}: metrics ({report.cases} cases)")
        ax.tick_params(axis="x", rotation=30)
        fig.tight_layout()
        path = directory / "metrics.png"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    if report.tallies:
        dimensions = sorted(report.tallies)
        fig, ax = plt.subplots(figsize=(max(4, len(dimensions) * 1.6), 3.5))
        width = 0.25
        for offset, outcome in enumerate(OUTCOMES):
            xs = [i + (offset - 1) * width for i in range(len(dimensions))]
            ys = [report.tallies[d].get(outcome, 0) for d in dimensions]
            ax.bar(xs, ys, width=width, label=outcome)
        ax.set_xticks(range(len(dimensions)))
        ax.set_xticklabels(dimensions, rotation=15)
        ax.set_ylabel("count")
        ax.set_title(f"{report.dimension}: judged outcomes")
        ax.legend()
        fig.tight_layout()
        path = directory / "tallies.png"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
