"""Figures for the CLI report path; every function returns a Figure."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# Fixed metadata keeps saved PNGs byte-identical across runs.
SAVE_KW = {"dpi": 120, "metadata": {"Software": None}}


def new_figure(width=6.0, height=None):
    golden = (np.sqrt(5) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height or width * golden))
    ax.grid(True, alpha=0.3)
    return fig, ax


def save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="png", **SAVE_KW)
    plt.close(fig)


def plot_sweep(loads, total, per_class, ci=None):
    fig, ax = new_figure()
    loads = np.asarray(loads)
    ax.plot(loads, loads, color="0.6", ls=":", lw=1, label="T = G")
    ax.plot(loads, total, "o-", color="k", ms=3, label="total")
    if ci is not None:
        ax.fill_between(loads, np.asarray(total) - ci, np.asarray(total) + ci, color="k", alpha=0.15)
    if len(per_class) > 1:
        for i, t in enumerate(per_class):
            ax.plot(loads, t, "--", lw=1, label=f"class {i + 1}")
    ax.set_xlabel("traffic load G")
    ax.set_ylabel("throughput T")
    ax.set_ylim(0, max(1.0, float(np.max(loads))))
    ax.legend(loc="upper left", frameon=False)
    return fig


def plot_region(vertices, t_star=None):
    fig, ax = new_figure(height=4.5)
    xy = np.asarray(vertices + [vertices[0]])
    ax.fill(xy[:, 0], xy[:, 1], color="C0", alpha=0.25)
    ax.plot(xy[:, 0], xy[:, 1], color="C0")
    title = "capacity region" if t_star is None else f"capacity region, T* = {t_star:.3g}"
    ax.set_title(title)
    ax.set_xlabel("$T_1$")
    ax.set_ylabel("$T_2$")
    ax.set_aspect("equal")
    ax.set_xlim(0, None)
    ax.set_ylim(0, None)
    return fig


def plot_delay(avg, worst):
    fig, ax = new_figure()
    idx = np.arange(len(avg))
    ax.bar(idx - 0.2, avg, width=0.4, label="average")
    ax.bar(idx + 0.2, worst, width=0.4, label="maximum")
    ax.set_xticks(idx, [f"class {i + 1}" for i in idx])
    ax.set_ylabel("delay [frames]")
    ax.legend(frameon=False)
    return fig


def plot_slot_histograms(histograms: dict):
    fig, ax = new_figure()
    width = 0.8 / len(histograms)
    for j, (label, probs) in enumerate(histograms.items()):
        m = np.arange(len(probs))
        ax.bar(m + (j - (len(histograms) - 1) / 2) * width, probs, width=width, label=label)
    ax.set_xlabel("slot degree m")
    ax.set_ylabel(r"$\Psi_m$")
    ax.set_xlim(-0.5, 12.5)
    ax.legend(frameon=False)
    return fig


def plot_de_trace(trace, load, threshold):
    fig, ax = new_figure()
    ax.semilogy(np.maximum(trace, 1e-300), lw=1)
    ax.set_xlabel("iteration")
    ax.set_ylabel("unresolved replica probability")
    ax.set_title(f"G = {load:.3g} (threshold {threshold:.4f})")
    return fig
