"""Matplotlib renderings for the report path.

Figures land next to the CSV/JSON output of a run; everything uses the Agg
backend so headless runs work.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _bins(values, nbins):
    """Histogram bins that tolerate a degenerate value range."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        pad = max(1e-12, abs(hi) * 1e-6, 0.5 * 1e-12) + 0.5
        return np.linspace(lo - pad, hi + pad, 11)
    return nbins


def flag_curvature_figure(values, path, title="sampled flag curvature"):
    """Histogram of sampled flag curvatures with the zero line marked."""
    values = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.hist(values, bins=_bins(values, min(60, max(10, values.size // 20))),
            color="#3a6ea5")
    ax.axvline(0.0, color="#c23b22", lw=1.0)
    ax.axvline(values.min(), color="#444444", lw=0.8, ls="--",
               label=f"min = {values.min():.4g}")
    ax.set_xlabel("flag curvature")
    ax.set_ylabel("count")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def s_curvature_figure(values, path, title="sampled |S-curvature|"):
    """Log-scale histogram of |S| over sampled rays."""
    values = np.abs(np.asarray(values, dtype=float))
    floor = 1e-18
    logs = np.log10(np.maximum(values, floor))
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.hist(logs, bins=_bins(logs, min(60, max(10, values.size // 20))),
            color="#4f7942")
    ax.set_xlabel("log10 |S|")
    ax.set_ylabel("count")
    ax.set_title(title + f"  (max = {values.max():.3e})")
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def residual_figure(residuals, path, title="oracle residuals"):
    """Bar chart of named cross-check residuals on a log scale."""
    names = list(residuals.keys())
    vals = np.array([max(abs(residuals[k]), 1e-18) for k in names])
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.barh(names, np.log10(vals), color="#8063a8")
    ax.set_xlabel("log10 residual")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path
