"""Matplotlib figures written as fixed-size 960x540 SVG files."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

WIDTH, HEIGHT = 960, 540
_PT_PER_INCH = 72.0

_RC = {
    "svg.hashsalt": "rifslab",
    "svg.fonttype": "none",
    "font.size": 13,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}


def _figure():
    # SVG units are points, so this size gives viewBox="0 0 960 540"
    fig, ax = plt.subplots(figsize=(WIDTH / _PT_PER_INCH, HEIGHT / _PT_PER_INCH))
    return fig, ax


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "rifslab"})
    plt.close(fig)


def plot_trace(trace, path, title=None):
    with plt.rc_context(_RC):
        fig, ax = _figure()
        x = np.log10(trace.eps)
        ax.plot(x, trace.scaled_lower, marker="o", ms=3, label="scaled lower")
        ax.plot(x, trace.scaled_upper, marker="s", ms=3, label="scaled upper")
        ax.set_xlabel(r"$\log_{10}\,\varepsilon$")
        ax.set_ylabel(r"$\varepsilon^{s-d}\,\mathcal{L}^d(\langle F\rangle_\varepsilon)$")
        ax.invert_xaxis()
        ax.set_title(title or f"content trace, s = {trace.s:.6g}")
        ax.legend(loc="best")
        fig.tight_layout()
        _save(fig, path)


def plot_walks(walks, envelopes, path, labels=None, title=None, max_lines=20):
    """Overlay partial-sum walks with the +/- iterated-logarithm envelope of the first."""
    with plt.rc_context(_RC):
        fig, ax = _figure()
        for i, w in enumerate(walks[:max_lines]):
            n = np.arange(1, w.size + 1)
            ax.plot(n, w, lw=0.9, alpha=0.8, label=None if labels is None else labels[i])
        if envelopes:
            env = envelopes[0]
            n = np.arange(1, env.envelope.size + 1)
            ax.plot(n, env.envelope, "k--", lw=1.2, label="+envelope")
            ax.plot(n, -env.envelope, "k:", lw=1.2, label="-envelope")
        ax.set_xlabel("level n")
        ax.set_ylabel(r"$W_n=\sum_{i\leq n}\log\mathfrak{S}^s_{\omega_i}$")
        ax.set_title(title or "equicontractive walk")
        ax.legend(loc="upper left", fontsize=9)
        fig.tight_layout()
        _save(fig, path)
