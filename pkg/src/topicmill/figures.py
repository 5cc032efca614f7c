"""Matplotlib rendering for the report paths.

Every report command renders a figure next to its delimited output.  The
files are written with pinned metadata so repeated runs are byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import TopicSummary

_SAVE_OPTS = {"dpi": 120, "metadata": {"Software": "topicmill"}}


def _save(fig, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def topic_word_bars(summaries: Sequence[TopicSummary], path: str | Path, model_kind: str) -> None:
    """One horizontal bar panel of top-word weights per topic."""
    n = len(summaries)
    ncols = min(5, n)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.6 * nrows), squeeze=False)
    for ax in axes.ravel():
        ax.set_axis_off()
    for panel, summary in enumerate(summaries):
        ax = axes[panel // ncols][panel % ncols]
        ax.set_axis_on()
        words = [w for w, _ in summary.top_words][::-1]
        weights = [v for _, v in summary.top_words][::-1]
        ax.barh(range(len(words)), weights, color="tab:blue")
        ax.set_yticks(range(len(words)), words, fontsize=7)
        ax.set_title(f"Topic {summary.topic_id}", fontsize=9)
        ax.tick_params(axis="x", labelsize=7)
    fig.suptitle(f"Top words per topic ({model_kind})")
    fig.tight_layout(rect=(0, 0, 1, 0.96))
    _save(fig, path)


def coherence_bars(rows: Sequence[tuple[str, float]], path: str | Path) -> None:
    """Mean coherence per technique, highest first."""
    names = [name for name, _ in rows]
    values = [value for _, value in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.bar(names, values, color="tab:blue")
    ax.set_ylabel("Coherence Value")
    ax.set_title("Topic coherence by technique")
    for i, value in enumerate(values):
        ax.text(i, value, f"{value:.3f}", ha="center", va="bottom", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def projection_scatter(coords: np.ndarray, labels: np.ndarray, path: str | Path) -> None:
    """2-D embedding colored by cluster id."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    labels = np.asarray(labels)
    for k in np.unique(labels):
        pts = coords[labels == k]
        ax.scatter(pts[:, 0], pts[:, 1], s=14, label=f"Cluster {k}")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("Clustered documents (t-SNE)")
    if len(np.unique(labels)) <= 12:
        ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    _save(fig, path)
