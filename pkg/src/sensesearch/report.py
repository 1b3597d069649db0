"""Ranking reports: a delimited score matrix plus a rendered figure.

Used by the CLI's --report flag to drop `ranking.csv` and `ranking.png`
into a directory alongside the normal stdout output.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .weighting import RankingTable

CSV_NAME = "ranking.csv"
FIGURE_NAME = "ranking.png"


def write_ranking_csv(table: RankingTable, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["url", "top_sense", *table.sense_ids])
        for row in table.rows:
            writer.writerow(
                [row.url, row.top_sense or ""]
                + [f"{row.scores[sid]:.6f}" for sid in table.sense_ids]
            )


def write_ranking_figure(table: RankingTable, path: Path, title: str = "") -> None:
    """Grouped horizontal bars: one group per document, one bar per sense."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    n_docs = len(table.rows)
    n_senses = len(table.sense_ids)
    fig_height = max(2.5, 0.5 * n_docs * max(1, n_senses) * 0.6 + 1.5)
    fig, ax = plt.subplots(figsize=(8, fig_height))
    if n_docs and n_senses:
        group_positions = np.arange(n_docs)[::-1]  # top row first
        bar_height = 0.8 / n_senses
        for j, sense_id in enumerate(table.sense_ids):
            offsets = group_positions + 0.4 - (j + 0.5) * bar_height
            values = [row.scores[sense_id] for row in table.rows]
            ax.barh(offsets, values, height=bar_height, label=sense_id)
        ax.set_yticks(group_positions)
        ax.set_yticklabels([_short_label(row.url) for row in table.rows], fontsize=8)
        ax.legend(fontsize=8, loc="lower right")
        ax.axvline(0.0, color="black", linewidth=0.8)
    else:
        ax.text(0.5, 0.5, "no documents", ha="center", va="center")
        ax.set_axis_off()
    ax.set_xlabel("score")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _short_label(url: str, max_len: int = 40) -> str:
    label = url.rstrip("/").rsplit("/", 1)[-1] or url
    return label if len(label) <= max_len else label[: max_len - 3] + "..."


def write_report(table: RankingTable, out_dir: str | Path, title: str = "") -> list[Path]:
    """Write ranking.csv and ranking.png into out_dir; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / CSV_NAME
    figure_path = out / FIGURE_NAME
    write_ranking_csv(table, csv_path)
    write_ranking_figure(table, figure_path, title)
    return [csv_path, figure_path]
