"""Matplotlib figures rendered next to the delimited evaluation reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evalmetrics import EvalReport

_SAVEFIG_KW = {"dpi": 120, "metadata": {"Software": None}}  # keep output reproducible


def plot_variant_metrics(reports: dict[str, EvalReport], path) -> None:
    """Grouped bar chart of macro F2 / P / R per system variant."""
    names = list(reports)
    metrics = ("F2", "P", "R")
    values = {
        "F2": [reports[n].macro_f2 for n in names],
        "P": [reports[n].macro_precision for n in names],
        "R": [reports[n].macro_recall for n in names],
    }
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    width = 0.25
    for i, metric in enumerate(metrics):
        xs = [j + (i - 1) * width for j in range(len(names))]
        ax.bar(xs, values[metric], width=width, label=metric)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=15, ha="right")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("macro score")
    ax.set_title("Retrieval system variants")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG_KW)
    plt.close(fig)


def plot_recall_curves(
    curves: dict[str, list[tuple[int, float]]], path, title: str = "BM25 recall@k"
) -> None:
    """Recall@k curves, one line per query form (original vs term-expanded)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, points in curves.items():
        ks = [k for k, _ in points]
        vals = [v for _, v in points]
        ax.plot(ks, vals, marker="o", label=label)
    ax.set_xlabel("k")
    ax.set_ylabel("macro recall@k")
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG_KW)
    plt.close(fig)
