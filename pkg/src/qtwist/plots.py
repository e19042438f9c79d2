"""Figure rendering for the CLI report commands (Agg backend, files only)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# strip the library version so identical inputs give identical PNG bytes
_PNG_METADATA = {"Software": ""}


def _save(fig, path) -> None:
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)


def render_sweep(path, sign: str, rows: list) -> None:
    """Quantum (solid) vs chain-model (dashed) trigger-row curves.

    rows: (theta, p_q_b1, p_q_b0, p_cl_b1, p_cl_b0, divergence) tuples.
    """
    theta = [r[0] for r in rows]
    a_star = 1 if sign == "+" else 0
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(theta, [r[1] for r in rows], "-", color="goldenrod",
            label=f"p({a_star}1) QM")
    ax.plot(theta, [r[2] for r in rows], "-", color="tab:blue",
            label=f"p({a_star}0) QM")
    ax.plot(theta, [r[3] for r in rows], "--", color="goldenrod",
            label=f"p({a_star}1) CL")
    ax.plot(theta, [r[4] for r in rows], "--", color="tab:blue",
            label=f"p({a_star}0) CL")
    ax.set_xlabel(r"$\theta$ (rad)")
    ax.set_ylabel("probability")
    ax.set_title(f"Trigger-row probabilities, sign {sign}")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def render_density_matrix(path, rho: np.ndarray, title: str,
                          fidelity: float | None = None) -> None:
    """Re/Im heatmaps of a reconstructed 4x4 density matrix."""
    labels = ["00", "01", "10", "11"]
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, part, name in ((axes[0], rho.real, "Re"), (axes[1], rho.imag, "Im")):
        im = ax.imshow(part, cmap="RdBu_r", vmin=-1, vmax=1)
        ax.set_xticks(range(4), labels)
        ax.set_yticks(range(4), labels)
        ax.set_title(name)
        fig.colorbar(im, ax=ax, fraction=0.046)
    sup = title if fidelity is None else f"{title}  (fidelity {fidelity:.4f})"
    fig.suptitle(sup)
    _save(fig, path)
