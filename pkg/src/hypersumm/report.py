"""Score reporting: text table, JSON record and a rendered figure.

Scores are stored in [0, 1] but displayed multiplied by 100 with one
decimal. The figure is a grouped bar chart written with the Agg backend, so
rendering needs no display and produces identical bytes for identical
scores.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .rouge import RougeScore

_FIELDS = (("recall", "recall"), ("precision", "precision"), ("f1", "F1"))


def display_value(value: float) -> str:
    return f"{value * 100:.1f}"


def score_report_record(scores: dict[str, RougeScore], pairs: int) -> dict:
    record: dict = {
        name: {"r": score.recall, "p": score.precision, "f": score.f1}
        for name, score in scores.items()
    }
    record["pairs"] = pairs
    return record


def format_score_table(scores: dict[str, RougeScore], pairs: int) -> str:
    lines = [f"scored {pairs} pair{'s' if pairs != 1 else ''}"]
    lines.append(f"{'metric':<10} {'recall':>9} {'precision':>9} {'f1':>9}")
    for name, score in scores.items():
        lines.append(
            f"{name:<10} {display_value(score.recall):>9}"
            f" {display_value(score.precision):>9} {display_value(score.f1):>9}"
        )
    return "\n".join(lines)


def write_score_report(path: str | Path, scores: dict[str, RougeScore], pairs: int) -> None:
    record = score_report_record(scores, pairs)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def render_score_figure(path: str | Path, scores: dict[str, RougeScore]) -> None:
    """Grouped bar chart of recall, precision and F1 per metric."""
    names = list(scores)
    width = 0.26
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for offset, (attr, label) in enumerate(_FIELDS):
        values = [getattr(scores[name], attr) * 100 for name in names]
        positions = [i + (offset - 1) * width for i in range(len(names))]
        bars = ax.bar(positions, values, width=width, label=label)
        ax.bar_label(bars, fmt="%.1f", fontsize=8)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names)
    ax.set_ylim(0, 110)
    ax.set_ylabel("score x 100")
    ax.grid(axis="y", alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
