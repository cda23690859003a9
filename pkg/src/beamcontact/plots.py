"""SVG figure emission for the CLI report paths.

All figures are rendered through the Agg-independent SVG backend with a
fixed hash salt and no embedded creation date, so repeated runs produce
byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "solution_figure",
    "convergence_figure",
    "spectrum_figure",
    "comparison_figure",
]

_RC = {"svg.hashsalt": "beamcontact", "figure.figsize": (7.0, 4.5)}


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def solution_figure(path, x, w, surface, title: str) -> None:
    """Deflection and contact surface on one axis."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(x, w, label="deflection w", color="tab:blue")
        ax.plot(x, surface, label="surface g", color="tab:orange", linestyle="--")
        ax.set_xlabel("x")
        ax.set_ylabel("w")
        ax.set_title(title)
        ax.legend()
        ax.grid(True, alpha=0.3)
        _save(fig, path)


def convergence_figure(path, h_values, errors_scaled, errors_inf, fitted_order: float) -> None:
    """Log-log error decay along the refinement ladder with the fitted slope."""
    h_values = np.asarray(h_values, dtype=float)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.loglog(h_values, errors_scaled, "o-", label="scaled grid 2-norm")
        ax.loglog(h_values, errors_inf, "s--", label="sup norm")
        anchor = errors_scaled[0] if errors_scaled[0] > 0 else 1.0
        guide = anchor * np.sqrt(h_values / h_values[0])
        ax.loglog(h_values, guide, ":", color="gray", label="order 0.5 guide")
        ax.set_xlabel("h")
        ax.set_ylabel("error vs nested reference")
        ax.set_title(f"fitted order {fitted_order:.3f}")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        _save(fig, path)


def spectrum_figure(path, formula, numeric) -> None:
    """Closed-form stencil spectrum against the computed one."""
    idx = np.arange(1, len(formula) + 1)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(idx, formula, "-", label="closed form")
        ax.plot(idx, numeric, "x", label="computed")
        ax.set_xlabel("eigenvalue index")
        ax.set_ylabel("eigenvalue")
        ax.set_title("stencil matrix spectrum")
        ax.legend()
        ax.grid(True, alpha=0.3)
        _save(fig, path)


def comparison_figure(path, x, values_a, values_b, label_a: str, label_b: str) -> None:
    """Two solution paths overlaid at shared abscissae."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(x, values_a, "-", label=label_a)
        ax.plot(x, values_b, "--", label=label_b)
        ax.set_xlabel("x")
        ax.set_ylabel("w")
        ax.set_title("solver cross-validation")
        ax.legend()
        ax.grid(True, alpha=0.3)
        _save(fig, path)
