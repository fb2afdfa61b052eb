"""Matplotlib rendering of corpus-report histograms to image files.

Used by the CLI stats stage to drop PNG figures next to the delimited
plot-data files.  Rendering is headless (Agg) and omits volatile PNG
metadata so repeated runs produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .stats import SPECIAL_MARKERS, CorpusReport, Histogram  # noqa: E402

_SAVE_KWARGS = {"dpi": 120, "metadata": {"Software": None}}


def _trimmed(hist: Histogram) -> tuple[list[int], list[int]]:
    """Bin indices and counts up to the last non-empty bin (at least 10)."""
    last = 0
    for i, c in enumerate(hist.counts):
        if c:
            last = i
    last = max(last, 10)
    xs = list(range(last + 1))
    return xs, hist.counts[:last + 1]


def save_histogram_figure(hist: Histogram, title: str, xlabel: str, path) -> Path:
    xs, ys = _trimmed(hist)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(xs, ys, width=0.9, color="#33658a")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("tweets")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return Path(path)


def save_special_tokens_figure(special_hists: dict[str, Histogram], path) -> Path:
    kinds = list(SPECIAL_MARKERS)
    fig, axes = plt.subplots(2, 3, figsize=(11, 6), sharey=False)
    for ax, kind in zip(axes.flat, kinds):
        xs, ys = _trimmed(special_hists[kind])
        ax.bar(xs, ys, width=0.9, color="#f26419")
        ax.set_title(kind)
        ax.set_xlabel("per tweet")
    fig.suptitle("Special-token distributions")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
    return Path(path)


def render_report_figures(report: CorpusReport, outdir) -> list[Path]:
    """Render token/char/special-token figures into outdir."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [
        save_histogram_figure(report.token_hist, "Tokens per tweet",
                              "subword tokens", outdir / "token_hist.png"),
        save_histogram_figure(report.char_hist, "Characters per tweet",
                              "characters", outdir / "char_hist.png"),
        save_special_tokens_figure(report.special_hists, outdir / "special_hists.png"),
    ]
    return written
