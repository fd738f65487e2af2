"""Figures for sweep results: BLER and average real operations versus Eb/N0."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linestyle": ":",
    # Keep text as text so labels stay searchable in the SVG.
    "svg.fonttype": "none",
}

MARKERS = "osd^v<>ph*"


def _series(points, attr):
    x = np.array([p.ebno_db for p in points], dtype=float)
    y = np.array([getattr(p, attr) for p in points], dtype=float)
    keep = y > 0
    return x[keep], y[keep]


def plot_curves(curves, path, title=None):
    """Render a two-panel figure (BLER left, average real ops right) to ``path``.

    ``curves`` maps a legend label to a list of CurvePoint. Zero-valued points
    are dropped from the log axes. Returns the output path.
    """
    with plt.rc_context(STYLE):
        fig, (ax_bler, ax_ops) = plt.subplots(1, 2, figsize=(7.2, 3.0))
        for i, (label, points) in enumerate(curves.items()):
            mk = MARKERS[i % len(MARKERS)]
            x, y = _series(points, "bler")
            if x.size:
                ax_bler.semilogy(x, y, marker=mk, label=label)
            x, y = _series(points, "avg_real_ops")
            if x.size:
                ax_ops.semilogy(x, y, marker=mk, label=label)
        ax_bler.set_xlabel("Eb/N0 (dB)")
        ax_bler.set_ylabel("BLER (log10 scale)")
        ax_ops.set_xlabel("Eb/N0 (dB)")
        ax_ops.set_ylabel("average real operations (log10 scale)")
        if ax_bler.get_legend_handles_labels()[0]:
            ax_bler.legend(loc="lower left")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
