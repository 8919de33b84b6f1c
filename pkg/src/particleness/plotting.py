"""Matplotlib rendering of scan results to image files."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import DEFAULT_BOUND_INTERCEPT, DEFAULT_BOUND_SLOPE, ScanRecord

_RANK_STYLE = {1: ("+", "red"), 2: ("x", "blue"), 3: ("*", "magenta")}


def render_scan_figure(
    records: Sequence[ScanRecord],
    path: str | Path,
    a: float = DEFAULT_BOUND_SLOPE,
    b: float = DEFAULT_BOUND_INTERCEPT,
    dpi: int = 150,
) -> None:
    """Scatter of (particleness, coherence) by rank with the bounding line."""
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    xs = np.linspace(0.0, 1.45, 200)
    # bounding line in record coordinates: particleness/2 + a*coherence = b
    ax.plot(xs, (b - xs / 2.0) / a, color="black", lw=1.2, label=f"P/2 + {a:g} C = {b:g}")
    for rank in sorted({r.rank for r in records}):
        marker, color = _RANK_STYLE.get(rank, (".", "gray"))
        pts = [(r.particleness, r.coherence) for r in records if r.rank == rank]
        arr = np.asarray(pts)
        ax.scatter(
            arr[:, 0], arr[:, 1], marker=marker, s=14, linewidths=0.8,
            color=color, label=f"rank {rank}",
        )
    ax.set_xlabel("trace-norm particleness")
    ax.set_ylabel("trace-norm coherence")
    ax.set_xlim(0.0, 1.45)
    ax.set_ylim(0.0, 1.45)
    ax.legend(loc="upper right", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
