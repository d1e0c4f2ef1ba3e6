"""Figures for numerical ranges and phase vectors (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_numerical_range(points, eigenvalues=None, phi_max=None, phi_min=None, path=None,
                         title: str | None = None):
    """Boundary of ``W(C)``, its eigenvalues and, when sectorial, the supporting rays."""
    points = np.asarray(points, dtype=np.complex128)
    fig, ax = plt.subplots(figsize=(5, 5))
    closed = np.append(points, points[:1])
    ax.fill(closed.real, closed.imag, color="tab:blue", alpha=0.15, lw=0)
    ax.plot(closed.real, closed.imag, color="tab:blue", lw=1.2, label="boundary of W(C)")
    if eigenvalues is not None:
        ev = np.asarray(eigenvalues, dtype=np.complex128)
        ax.plot(ev.real, ev.imag, "k.", ms=8, label="eigenvalues")
    radius = 1.15 * max(np.abs(points).max(), 1e-12)
    if phi_max is not None and phi_min is not None:
        for ang, style in ((phi_max, "-"), (phi_min, "--")):
            ax.plot([0, radius * np.cos(ang)], [0, radius * np.sin(ang)], style,
                    color="tab:red", lw=1)
        ax.plot([], [], "-", color="tab:red", label="supporting rays")
    ax.plot([0], [0], "+", color="gray")
    ax.set_aspect("equal")
    ax.axhline(0, color="gray", lw=0.5)
    ax.axvline(0, color="gray", lw=0.5)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    if path is not None:
        fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_phases(phases, eigen_angles=None, path=None, title: str | None = None):
    """Phases (and optionally eigenvalue angles) as points on the unit circle."""
    phases = np.asarray(phases, dtype=float)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    t = np.linspace(0, 2 * np.pi, 361)
    ax.plot(np.cos(t), np.sin(t), color="lightgray", lw=1)
    for ph in phases:
        ax.plot([0, np.cos(ph)], [0, np.sin(ph)], color="tab:blue", lw=1)
    ax.plot(np.cos(phases), np.sin(phases), "o", color="tab:blue", label="phases")
    if eigen_angles is not None:
        ea = np.asarray(eigen_angles, dtype=float)
        ax.plot(0.85 * np.cos(ea), 0.85 * np.sin(ea), "x", color="tab:orange",
                label="eigenvalue angles")
    ax.set_aspect("equal")
    ax.set_xlim(-1.2, 1.2)
    ax.set_ylim(-1.2, 1.2)
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    if path is not None:
        fig.savefig(path, dpi=120)
    plt.close(fig)


__all__ = ["plot_numerical_range", "plot_phases"]
