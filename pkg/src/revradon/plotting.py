"""Report figures written next to the numeric outputs (Agg backend, PNG)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# no timestamps or version strings in the files, so reruns are byte-identical
_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def plot_sinogram(sino, path, theta_index=0):
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(sino.values[:, theta_index, :].T, origin="lower", aspect="auto",
                   extent=(sino.s[0], sino.s[-1], sino.y3[0], sino.y3[-1]), cmap="viridis")
    ax.set_xlabel("s")
    ax.set_ylabel("y3")
    ax.set_title(f"sinogram, theta = {sino.theta[theta_index]:.3f}")
    fig.colorbar(im, ax=ax)
    return _save(fig, path)


def plot_volume(vol, path, curve=None):
    """Central slices ``x3 = 0`` and ``x2 = 0`` with an optional mirror curve."""
    v = vol.values
    n1, n2, n3 = v.shape
    e = vol.extent
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].imshow(v[:, :, n3 // 2].T, origin="lower", extent=(-e[0], e[0], -e[1], e[1]), cmap="gray")
    axes[0].set_title("x3 = 0")
    axes[0].set_xlabel("x1")
    axes[0].set_ylabel("x2")
    if curve is not None:
        axes[0].plot(curve.points[:, 0], curve.points[:, 1], "r--", lw=0.6)
        axes[0].set_xlim(-e[0], e[0])
        axes[0].set_ylim(-e[1], e[1])
    axes[1].imshow(v[:, n2 // 2, :].T, origin="lower", extent=(-e[0], e[0], -e[2], e[2]), aspect="auto",
                   cmap="gray")
    axes[1].set_title("x2 = 0")
    axes[1].set_xlabel("x1")
    axes[1].set_ylabel("x3")
    return _save(fig, path)


def plot_condition_curves(curves, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    for c in curves:
        order = np.argsort(c.xi)
        ax.semilogy(c.xi[order], c.cond[order], label=c.family["family"])
    ax.set_xlabel("xi")
    ax.set_ylabel("cond(V_xi)")
    ax.legend()
    return _save(fig, path)


def plot_artifact_curve(curve, path, radius=1.0):
    fig, ax = plt.subplots(figsize=(5, 5))
    th = np.linspace(0, 2 * np.pi, 256)
    ax.plot(radius * np.cos(th), radius * np.sin(th), "k-", lw=0.8, label="centers")
    ax.plot(curve.points[:, 0], curve.points[:, 1], "r-", label="mirror points")
    ax.plot([curve.source[0]], [curve.source[1]], "bo", label="source")
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)
