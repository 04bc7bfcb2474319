"""Figure rendering for the CLI report path.

All figures are written as PNG files next to the delimited output; rendering
is deterministic (fixed size, dpi and style, no timestamps).
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (6.4, 4.0)
_DPI = 110


def _save(fig, out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_eval_curve(x, y, label: str, out_dir: str, name: str = "eval.png") -> str:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(x, y, lw=1.2)
    ax.axvline(1.0, color="0.7", ls="--", lw=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel(label)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return _save(fig, out_dir, name)


def plot_gram_heatmap(gram, out_dir: str, name: str = "gram.png") -> str:
    g = np.asarray(gram)
    d = np.sqrt(np.abs(np.diag(g)))
    scaled = g / np.outer(d, d)
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(np.log10(np.abs(scaled) + 1e-18), cmap="viridis")
    fig.colorbar(im, ax=ax, label="log10 |G_mn| / sqrt(G_mm G_nn)")
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    fig.tight_layout()
    return _save(fig, out_dir, name)


def plot_suite_residuals(names, residuals, tols, out_dir: str,
                         name: str = "residuals.png") -> str:
    idx = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(max(6.4, 0.6 * len(names) + 2), 4.2))
    res = np.maximum(np.abs(np.asarray(residuals, dtype=float)), 1e-18)
    ax.bar(idx, res, color="#336699", label="residual")
    ax.plot(idx, tols, "r_", markersize=18, label="tolerance")
    ax.set_yscale("log")
    ax.set_xticks(idx)
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.legend()
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    return _save(fig, out_dir, name)


def plot_spectrum(s_grid, w_times_f2, lambdas_discrete, lambda_cut,
                  out_dir: str, name: str = "spectrum.png") -> str:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.8))
    ax1.plot(s_grid, w_times_f2, lw=1.0)
    ax1.set_xlabel("s")
    ax1.set_ylabel("w(s) F(s)^2")
    ax1.grid(alpha=0.3)
    ax2.plot(lambdas_discrete, np.zeros_like(lambdas_discrete), "o", label="discrete")
    ax2.axvline(lambda_cut, color="r", ls="--", label="continuum edge")
    ax2.set_xlabel("lambda")
    ax2.set_yticks([])
    ax2.legend()
    fig.tight_layout()
    return _save(fig, out_dir, name)
