"""Static SVG plots of training histories."""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed salt and no date: identical inputs give byte-identical SVG
plt.rcParams["svg.hashsalt"] = "qencode"
_SVG_META = {"Date": None, "Creator": "qencode"}


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def plot_loss(histories: Mapping[str, Sequence[float]], path, title: str = "Loss evolution") -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, losses in histories.items():
        ax.plot(np.arange(1, len(losses) + 1), losses, marker="." if len(losses) < 3 else None, label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("cross-entropy loss")
    ax.set_title(title)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_parameters(param_history: Sequence[Sequence[float]], path,
                    title: str = "Ansatz parameter evolution") -> None:
    params = np.atleast_2d(np.asarray(param_history, dtype=float))
    fig, ax = plt.subplots(figsize=(7, 4))
    steps = np.arange(1, params.shape[0] + 1)
    for k in range(params.shape[1]):
        ax.plot(steps, params[:, k], marker="." if len(steps) < 3 else None, linewidth=1, label=f"θ[{k}]")
    ax.set_xlabel("iteration")
    ax.set_ylabel("parameter value (rad)")
    ax.set_title(title)
    ax.legend(ncol=3, fontsize=6)
    fig.tight_layout()
    _save(fig, path)
