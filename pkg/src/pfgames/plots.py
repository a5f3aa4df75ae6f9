"""Convergence figures rendered next to the CSV output.

The CSVs remain the canonical record; these figures are the human-readable
report: metric against average LMO calls on log-log axes, one line per run.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_convergence", "plot_facial_distance"]


def _read_csv(path: Path) -> dict[str, list[float]]:
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    cols: dict[str, list[float]] = {h: [] for h in header}
    for line in lines[1:]:
        for h, cell in zip(header, line.split(",")):
            cols[h].append(float(cell))
    return cols


def plot_convergence(csv_paths: list[Path], out_path: Path, title: str) -> Path:
    fig, ax = plt.subplots(figsize=(7.5, 5.0))
    for path in sorted(csv_paths):
        cols = _read_csv(path)
        xs, ys = [], []
        for x, y in zip(cols["avg_lmo_calls"], cols["metric"]):
            if y > 0:
                xs.append(x)
                ys.append(y)
        if xs:
            ax.plot(xs, ys, label=path.stem, linewidth=1.2)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("average LMO calls per player")
    ax.set_ylabel("equilibrium gap / max average regret")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if len(csv_paths) <= 12:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_facial_distance(rows: list[dict], out_path: Path) -> Path:
    """Brute-force facial distances against their certified lower bounds."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    labels = [r["name"] for r in rows]
    xs = range(len(rows))
    ax.bar(xs, [r["brute"] for r in rows], width=0.6, label="brute force", alpha=0.8)
    ax.plot(xs, [r["bound"] for r in rows], "k_", markersize=18, label="lower bound")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("facial distance")
    ax.set_title("facial distance: brute force vs certified bound")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
