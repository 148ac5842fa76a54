"""Figure rendering for evaluation reports.

The CLI report path writes these PNG files next to the delimited output:
one panel of the four curve families per method and a summary bar chart
across methods.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_method_curves(report, path) -> Path:
    """Render CMC, FAR/FRR, ROC and recall/precision curves of one method."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    fig.suptitle(f"{report.method_id} (threshold {report.threshold:g})")

    ax = axes[0, 0]
    ranks = np.arange(1, report.cmc.size + 1)
    ax.plot(ranks, report.cmc, marker="o", ms=3)
    ax.set_xlabel("rank k")
    ax.set_ylabel("recognition rate")
    ax.set_title(f"CMC (CCR {report.ccr:.3f})")
    ax.set_ylim(-0.02, 1.02)

    ax = axes[0, 1]
    idx = np.arange(report.far.size)
    ax.plot(idx, report.far, label="FAR")
    ax.plot(idx, report.frr, label="FRR")
    ax.set_xlabel("threshold step")
    ax.set_ylabel("error rate")
    ax.set_title(f"FAR/FRR (EER {report.eer:.3f})")
    ax.legend()

    ax = axes[1, 0]
    ax.plot(report.roc_far, report.tar)
    ax.plot([0, 1], [0, 1], ls=":", c="gray", lw=1)
    ax.set_xlabel("FAR")
    ax.set_ylabel("TAR")
    ax.set_title(f"ROC (AUC {report.auc:.3f})")

    ax = axes[1, 1]
    ax.plot(report.rcl, report.pcn)
    ax.set_xlabel("recall")
    ax.set_ylabel("precision")
    ax.set_title(f"recall/precision (MAP {report.map:.3f})")
    ax.set_ylim(-0.02, 1.02)

    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_summary(reports, path) -> Path:
    """Bar chart of CCR and AUC across all evaluated methods."""
    fig, ax = plt.subplots(figsize=(max(6, 0.8 * len(reports) + 2), 4))
    names = [r.method_id for r in reports]
    x = np.arange(len(reports))
    ax.bar(x - 0.2, [r.ccr for r in reports], width=0.4, label="CCR")
    ax.bar(x + 0.2, [0.0 if np.isnan(r.auc) else r.auc for r in reports],
           width=0.4, label="AUC")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=45, ha="right")
    ax.set_ylim(0, 1.05)
    ax.set_title("method comparison")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_figures(reports, outdir) -> list:
    """Write all report figures into a directory; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for report in reports:
        written.append(plot_method_curves(report, outdir / f"{report.method_id}_curves.png"))
    if reports:
        written.append(plot_summary(reports, outdir / "summary.png"))
    return written
