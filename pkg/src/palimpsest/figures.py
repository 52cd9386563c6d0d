"""Matplotlib renderings of pipeline diagnostics.

Imported lazily by the pipeline so that plain restoration runs never pay
the matplotlib import cost. All figures go through the Agg backend and
render byte-identically for identical inputs.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be pinned first

from .histogram import ChannelHistogram

_CHANNEL_STYLES = (("red", "#c0392b"), ("green", "#27ae60"), ("blue", "#2980b9"))


def _plot_triple(ax, triple: tuple[ChannelHistogram, ChannelHistogram, ChannelHistogram]):
    for hist, (label, color) in zip(triple, _CHANNEL_STYLES):
        ax.plot(range(256), hist.bins, color=color, linewidth=0.9, label=label)
    ax.set_xlim(0, 255)
    ax.set_xlabel("tone")
    ax.set_ylabel("pixels")


def render_histograms(
    path,
    before: tuple[ChannelHistogram, ChannelHistogram, ChannelHistogram],
    after: tuple[ChannelHistogram, ChannelHistogram, ChannelHistogram] | None = None,
    threshold: int | None = None,
) -> None:
    """Plot per-channel tone histograms, before and (optionally) after removal.

    A vertical line marks the removal threshold when given.
    """
    panels = 2 if after is not None else 1
    fig, axes = plt.subplots(1, panels, figsize=(5.5 * panels, 4.0), squeeze=False)
    _plot_triple(axes[0][0], before)
    axes[0][0].set_title("input")
    if threshold is not None:
        axes[0][0].axvline(threshold, color="#555555", linestyle="--", linewidth=1.0)
    if after is not None:
        _plot_triple(axes[0][1], after)
        axes[0][1].set_title("after ink removal")
        if threshold is not None:
            axes[0][1].axvline(threshold, color="#555555", linestyle="--", linewidth=1.0)
    axes[0][0].legend(loc="upper left", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def render_fill_curve(path, fills_per_iteration: tuple[int, ...]) -> None:
    """Plot how many holes each interpolation sweep filled."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    if fills_per_iteration:
        iterations = range(1, len(fills_per_iteration) + 1)
        ax.plot(iterations, fills_per_iteration, marker="o", markersize=3, color="#8e44ad")
        ax.set_xlim(0.5, len(fills_per_iteration) + 0.5)
    else:
        ax.text(0.5, 0.5, "no interpolation sweeps ran", ha="center", va="center",
                transform=ax.transAxes, color="#555555")
    ax.set_xlabel("iteration")
    ax.set_ylabel("pixels filled")
    ax.set_title("interpolation progress")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
