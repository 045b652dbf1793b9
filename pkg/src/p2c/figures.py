"""Render evaluation metrics to an image file next to the text report."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_report_figure(report, out_path):
    """Bar chart of both precisions with the latency stamped in the corner."""
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    names = ["Char_Precision", "Sen_Precision"]
    values = [report.char_precision, report.sentence_precision]
    bars = ax.bar(names, values, color=["#4878d0", "#ee854a"], width=0.55)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("precision")
    ax.bar_label(bars, fmt="%.3f", padding=2, fontsize=8)
    ax.set_title(report.engine_desc, fontsize=9)
    ax.text(0.98, 0.96, f"{report.ms_per_token:.3f} ms/token",
            transform=ax.transAxes, ha="right", va="top", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
