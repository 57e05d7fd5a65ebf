"""SVG figures for sweep and comparison results."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

MARKER_GID = "critical-marker"


def emit_plot(rows, destination, x, y=(), group=None, loglog=False, markers=(), xlabel=None, ylabel=None, title=None):
    """Draw one line per ``y`` column (or per ``group`` value) against ``x``.

    ``markers`` become dashed vertical lines, each tagged with an SVG id
    starting with ``critical-marker``.
    """
    rows = list(rows)
    if isinstance(y, str):
        y = (y,)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    try:
        if group is not None:
            series = defaultdict(list)
            for r in rows:
                series[getattr(r, group)].append(r)
            col = y[0]
            for name, members in series.items():
                members.sort(key=lambda r: getattr(r, x))
                ax.plot([getattr(r, x) for r in members], [getattr(r, col) for r in members], marker="o", ms=3, label=str(name))
        else:
            for col in y:
                if rows:
                    ax.plot([getattr(r, x) for r in rows], [getattr(r, col) for r in rows], label=col)
        for i, m in enumerate(markers):
            line = ax.axvline(m, color="0.5", linestyle="--", linewidth=0.8)
            line.set_gid(f"{MARKER_GID}-{i}")
        if loglog:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xlabel or x)
        ax.set_ylabel(ylabel or ", ".join(y))
        if title:
            ax.set_title(title)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        path = Path(destination)
        with plt.rc_context({"svg.hashsalt": "rqae", "svg.fonttype": "none"}):
            try:
                fig.savefig(path, format="svg", metadata={"Date": None})
            except OSError as exc:
                raise OSError(f"cannot write plot to {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path
