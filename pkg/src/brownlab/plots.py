"""Matplotlib figure writers for the CLI report path.

All figures render to files through the Agg backend; SVG output is made
deterministic (fixed hash salt, no embedded date) so repeated runs with the
same seed produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "brownlab"

_SAVE_KW = {"bbox_inches": "tight", "metadata": {"Date": None}}


def _finish(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kw = dict(_SAVE_KW)
    if path.suffix.lower() != ".svg":
        kw.pop("metadata")
    fig.savefig(path, **kw)
    plt.close(fig)
    return path


def save_spectrum_scatter(points, path, title=None, guide_radius=1.0) -> Path:
    """Scatter of complex points with an optional circle guide."""
    z = np.asarray(points, dtype=np.complex128).ravel()
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(z.real, z.imag, s=6, alpha=0.6, linewidths=0, color="#1f5fa8")
    if guide_radius:
        theta = np.linspace(0, 2 * np.pi, 361)
        ax.plot(
            guide_radius * np.cos(theta),
            guide_radius * np.sin(theta),
            ls="--",
            lw=0.8,
            color="#888888",
        )
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def save_curve(x, y, path, xlabel, ylabel, title=None, yerr=None, ref=None, logx=False) -> Path:
    """Line/marker plot of y against x with optional error bars and a
    horizontal reference line."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if yerr is not None:
        ax.errorbar(x, y, yerr=yerr, marker="o", ms=4, lw=1.2, capsize=3, color="#1f5fa8")
    else:
        ax.plot(x, y, marker="o", ms=4, lw=1.2, color="#1f5fa8")
    if ref is not None:
        ax.axhline(ref, ls="--", lw=0.8, color="#b03a2e")
    if logx:
        ax.set_xscale("symlog", linthresh=min((abs(v) for v in x if v), default=1e-6))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    return _finish(fig, path)
