"""Report figures rendered alongside the delimited experiment output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import ExperimentResult

_LABELS = {"psp": "slot filling", "greedy": "greedy"}


def render_experiment_figure(result: ExperimentResult, path: str | Path) -> None:
    """Mean peak per instance size with 95% confidence bars and the bound curve."""
    config = result.config
    ns = list(config.n_values)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for algo in config.algorithms:
        cells = [result.cell(n, algo) for n in ns]
        ax.errorbar(
            ns,
            [c.mean_peak for c in cells],
            yerr=[c.ci_half_width for c in cells],
            marker="o",
            markersize=4,
            capsize=3,
            label=_LABELS.get(algo, algo),
        )
    bounds = [float(np.mean(result.cell(n, config.algorithms[0]).uppers)) for n in ns]
    ax.plot(ns, bounds, linestyle="--", color="black", label="guaranteed bound")
    ax.set_xlabel("number of demands")
    ax.set_ylabel("peak power")
    ax.set_title(f"ell={config.ell:g}, r={config.r:g}, {config.reps} repetitions per size")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
