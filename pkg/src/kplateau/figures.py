"""Figure rendering for traces and 3D configuration snapshots.

Uses the Agg backend so figures render to files on headless machines.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .energy import realize

__all__ = ["trace_figure", "configuration_figure", "area_history_figure"]


def _series(rows, pick):
    xs, ys = [], []
    for row in rows:
        val = pick(row)
        if val is None:
            continue
        val = float(val)
        if np.isfinite(val):
            xs.append(row.iteration)
            ys.append(val)
    return xs, ys


def trace_figure(trace, path) -> None:
    """Two panels: energy components on top, film area and step size below."""
    fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 6.5))
    rows = trace.rows
    for label, pick in (
        ("elastic rod 1", lambda r: r.energy.e_el1),
        ("elastic rod 2", lambda r: r.energy.e_el2),
        ("gravity", lambda r: r.energy.e_g1 + r.energy.e_g2),
        ("film", lambda r: r.energy.e_film),
        ("total", lambda r: r.energy.e_total),
        ("penalized", lambda r: r.penalized),
    ):
        xs, ys = _series(rows, pick)
        if xs and any(abs(y) > 0 for y in ys):
            ax0.plot(xs, ys, label=label)
    ax0.set_ylabel("energy")
    ax0.legend(loc="best", fontsize=8)
    ax0.grid(alpha=0.3)

    xs, ys = _series(rows, lambda r: r.area)
    if xs:
        ax1.plot(xs, ys, color="tab:blue", label="film area")
    ax1.set_xlabel("outer iteration")
    ax1.set_ylabel("area")
    ax1.grid(alpha=0.3)
    xs, ys = _series(rows, lambda r: r.hausdorff_step if r.hausdorff_step > 0 else None)
    if xs:
        twin = ax1.twinx()
        twin.semilogy(xs, ys, color="tab:orange", alpha=0.7, label="step size")
        twin.set_ylabel("step size")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def area_history_figure(areas, path) -> None:
    """Film area against relaxation step for a fixed-boundary run."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(np.arange(len(areas)), np.asarray(areas, dtype=float))
    ax.set_xlabel("accepted step")
    ax.set_ylabel("film area")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def configuration_figure(link, mesh=None, path=None, curves=None) -> None:
    """3D view of the rod midlines and, when given, the spanning film."""
    if curves is None:
        curves = realize(link)
    fig = plt.figure(figsize=(7.0, 6.0))
    ax = fig.add_subplot(111, projection="3d")
    clouds = []
    for idx, fc in enumerate(curves, start=1):
        pts = np.vstack([fc.r, fc.r[:1]])
        ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], lw=2.0, label=f"rod {idx}")
        clouds.append(fc.r)
    if mesh is not None and mesh.n_triangles:
        ax.plot_trisurf(
            mesh.vertices[:, 0],
            mesh.vertices[:, 1],
            mesh.vertices[:, 2],
            triangles=mesh.triangles,
            color="tab:cyan",
            alpha=0.35,
            edgecolor="none",
        )
        clouds.append(mesh.vertices)
    cloud = np.vstack(clouds)
    center = 0.5 * (cloud.min(axis=0) + cloud.max(axis=0))
    half = max(float(np.max(cloud.max(axis=0) - cloud.min(axis=0))) / 2.0, 1e-6)
    for setter, c in zip((ax.set_xlim, ax.set_ylim, ax.set_zlim), center):
        setter(c - half, c + half)
    ax.set_box_aspect((1, 1, 1))
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
