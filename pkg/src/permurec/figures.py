"""Figure rendering for pipeline reports.

Everything draws through the Agg backend into PNG files placed next to
the delimited artifacts. Renders are kept deterministic: fixed figure
geometry, fixed dpi, and the writer's Software tag suppressed so that
re-running a pipeline reproduces each image byte for byte.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt
import numpy as np

from .curves import CellCurve
from .embedding import TutteEmbedding
from .measures import GridMeasure

__all__ = [
    "measure_figure",
    "curve_figure",
    "embedding_figure",
    "field_figure",
]

_SAVE = {"dpi": 100, "metadata": {"Software": None}}


def measure_figure(measure: GridMeasure, path) -> None:
    """Log-mass heatmap, x rightward and y upward."""
    fig, ax = plt.subplots(figsize=(5, 5))
    img = np.log(measure.mass).T
    im = ax.imshow(img, origin="lower", cmap="viridis",
                   extent=(0, 1, 0, 1), interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.8)
    ax.set_title(f"{measure.kind} measure, depth {measure.depth} (log mass)")
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def curve_figure(curve: CellCurve, path) -> None:
    """The visit order as a polyline through cell centers."""
    s = 1.0 / curve.side
    xs = [(i + 0.5) * s for i, _ in curve.cells]
    ys = [(j + 0.5) * s for _, j in curve.cells]
    if curve.closed:
        xs.append(xs[0])
        ys.append(ys[0])
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(xs, ys, lw=0.8, color="#30507a")
    ax.plot(xs[0], ys[0], "o", ms=4, color="#c04a30")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_title(f"{curve.kind}, depth {curve.depth}")
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def embedding_figure(embedding: TutteEmbedding, path) -> None:
    """Embedded graph: edges faint, boundary on the circle."""
    pos = embedding.positions
    fig, ax = plt.subplots(figsize=(5, 5))
    for a, b in embedding.graph.edges:
        za, zb = pos[a - 1], pos[b - 1]
        ax.plot([za.real, zb.real], [za.imag, zb.imag], lw=0.3,
                color="#888888", zorder=1)
    boundary = sorted(set(embedding.boundary_cycle))
    inner = [v for v in range(1, embedding.graph.n + 1) if v not in set(boundary)]
    bz = pos[[v - 1 for v in boundary]]
    iz = pos[[v - 1 for v in inner]] if inner else np.array([])
    ax.scatter(bz.real, bz.imag, s=8, color="#c04a30", zorder=2)
    if len(iz):
        ax.scatter(iz.real, iz.imag, s=5, color="#30507a", zorder=2)
    circle = np.exp(2j * np.pi * np.linspace(0, 1, 257))
    ax.plot(circle.real, circle.imag, lw=0.5, color="#bbbbbb", zorder=0)
    ax.set_aspect("equal")
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_title(f"harmonic embedding, n={embedding.graph.n}")
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def field_figure(field: np.ndarray, path, title: str = "recovered field") -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    im = ax.imshow(field.T, origin="lower", cmap="magma",
                   extent=(0, 1, 0, 1), interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.8)
    ax.set_title(title)
    fig.savefig(path, **_SAVE)
    plt.close(fig)
