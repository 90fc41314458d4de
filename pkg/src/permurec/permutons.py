"""Discrete permutons, their supports, and the support closure.

A permuton at resolution ``m`` is an ``m x m`` array of nonnegative
masses whose every row and every column sums to ``1/m``: the block
discretisation of a coupling of two uniform coordinates. ``mass[r, c]``
is the mass of ``[r/m, (r+1)/m] x [c/m, (c+1)/m]``, row first
coordinate, column second, both 0-based.

The permuton of a curve pair spreads each cell's mass along the
diagonal line segment matching the two visit intervals pointwise (the
piecewise linear time change between the curves). Rasterising those
segments keeps the marginals exactly uniform because the row intervals
partition ``[0, 1]`` and so do the column intervals.

The support closure implements one saturation rule: whenever two
support cells share a row or a column, the full product of their
component's rows and columns is added. Equivalently, view rows and
columns as the two sides of a bipartite graph with a cell as an edge;
each connected component contributes its complete biclique. One pass
is enough, the rule is idempotent and monotone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .curves import TimedCurve

__all__ = [
    "Permuton",
    "SupportSet",
    "AugmentedSupport",
    "permuton_from_pair",
    "permuton_from_permutation",
    "support_of",
    "augment_support",
    "reroot_permuton",
]

_MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class Permuton:
    """Block measure on the unit square, uniform in both coordinates.

    ``marginal_check`` is off only for the mass-weighted embedding of a
    permutation, which keeps the permutation's cell layout but lets row
    masses vary; everything built from curve pairs keeps it on.
    """

    resolution: int
    mass: np.ndarray
    marginal_check: bool = field(default=True, compare=False)
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        m = self.resolution
        if m < 1:
            raise ValueError(f"resolution must be positive, got {m}")
        arr = np.asarray(self.mass, dtype=float)
        if arr.shape != (m, m):
            raise ValueError(f"mass must have shape {(m, m)}, got {arr.shape}")
        if np.any(arr < 0):
            raise ValueError("masses must be nonnegative")
        total = float(arr.sum())
        if abs(total - 1.0) > _MARGINAL_TOL:
            raise ValueError(f"total mass must be 1, got {total!r}")
        if self.marginal_check:
            target = 1.0 / m
            rows = arr.sum(axis=1)
            cols = arr.sum(axis=0)
            bad_r = np.argmax(np.abs(rows - target))
            bad_c = np.argmax(np.abs(cols - target))
            if abs(rows[bad_r] - target) > _MARGINAL_TOL:
                raise ValueError(
                    f"row {bad_r} sums to {rows[bad_r]!r}, expected {target!r}")
            if abs(cols[bad_c] - target) > _MARGINAL_TOL:
                raise ValueError(
                    f"column {bad_c} sums to {cols[bad_c]!r}, expected {target!r}")
        object.__setattr__(self, "mass", arr)

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"Permuton(resolution={self.resolution})"


@dataclass(frozen=True)
class SupportSet:
    """Cells carrying positive permuton mass. Every row and column is hit."""

    resolution: int
    cells: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        m = self.resolution
        rows = set()
        cols = set()
        for r, c in self.cells:
            if not (0 <= r < m and 0 <= c < m):
                raise ValueError(f"cell ({r}, {c}) outside resolution {m}")
            rows.add(r)
            cols.add(c)
        if len(rows) != m or len(cols) != m:
            raise ValueError("support must meet every row and every column")
        object.__setattr__(self, "cells", frozenset((int(r), int(c))
                                                    for r, c in self.cells))

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self.cells

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class AugmentedSupport:
    """A support saturated under the shared-row/column product rule.

    ``row_groups`` and ``col_groups`` list, per bipartite component,
    the rows and columns whose product the component fills. Groups are
    aligned: component k fills ``row_groups[k] x col_groups[k]``.
    """

    resolution: int
    cells: FrozenSet[Tuple[int, int]]
    row_groups: Tuple[Tuple[int, ...], ...]
    col_groups: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        expect = set()
        seen_rows = set()
        seen_cols = set()
        if len(self.row_groups) != len(self.col_groups):
            raise ValueError("row and column groups must pair up")
        for rows, cols in zip(self.row_groups, self.col_groups):
            for r in rows:
                if r in seen_rows:
                    raise ValueError(f"row {r} appears in two groups")
                seen_rows.add(r)
            for c in cols:
                if c in seen_cols:
                    raise ValueError(f"column {c} appears in two groups")
                seen_cols.add(c)
            expect.update((r, c) for r in rows for c in cols)
        if expect != set(self.cells):
            raise ValueError("cells do not match the product of the groups")
        m = self.resolution
        if seen_rows != set(range(m)) or seen_cols != set(range(m)):
            raise ValueError("groups must cover every row and every column")

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self.cells

    def __len__(self) -> int:
        return len(self.cells)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def permuton_from_pair(first: TimedCurve, second: TimedCurve,
                       resolution: int) -> Permuton:
    """Coupling of the two visit clocks, rasterised at the given resolution.

    A cell visited during ``[u, u+w]`` by the first curve and
    ``[v, v+w]`` by the second contributes the segment
    ``{(u+p, v+p) : 0 <= p <= w}`` carrying mass ``w`` uniformly. The
    segment is cut wherever either coordinate crosses a block boundary
    and each piece lands in exactly one block.
    """
    if first.measure is not second.measure and not np.array_equal(
            first.measure.mass, second.measure.mass):
        raise ValueError("timed curves must share a measure")
    if first.depth != second.depth:
        raise ValueError("timed curves must live on the same grid")
    m = int(resolution)
    if m < 1:
        raise ValueError(f"resolution must be positive, got {resolution}")
    mass = np.zeros((m, m))
    ranks2 = second.curve._rank_index()
    for r1, cell in enumerate(first.curve.cells):
        u = first.breaks[r1]
        w = first.breaks[r1 + 1] - u
        r2 = ranks2[cell]
        v = second.breaks[r2]
        cuts = {0.0, w}
        for base in (u, v):
            k = int(np.ceil(base * m - 1e-15))
            while k / m < base + w:
                p = k / m - base
                if 0.0 < p < w:
                    cuts.add(p)
                k += 1
        ps = sorted(cuts)
        for p0, p1 in zip(ps, ps[1:]):
            mid = 0.5 * (p0 + p1)
            row = min(int((u + mid) * m), m - 1)
            col = min(int((v + mid) * m), m - 1)
            mass[row, col] += p1 - p0
    return Permuton(resolution=m, mass=mass,
                    meta={"depth": first.depth, "kind": first.measure.kind})


def permuton_from_permutation(sigma: Sequence[int],
                              weights: Optional[Sequence[float]] = None) -> Permuton:
    """Embed a permutation as a block permuton.

    ``sigma`` is 1-based: value ``sigma[k-1]`` is where ``k`` is sent.
    With uniform weights (the default) the result is a genuine permuton
    and the marginal invariant is enforced; explicit non-uniform
    weights produce the mass-weighted variant with the check relaxed.
    """
    n = len(sigma)
    if n == 0:
        raise ValueError("permutation must be non-empty")
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError("sigma must be a permutation of 1..n")
    if weights is None:
        w = np.full(n, 1.0 / n)
        uniform = True
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n,):
            raise ValueError(f"weights must have length {n}")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if abs(float(w.sum()) - 1.0) > _MARGINAL_TOL:
            raise ValueError("weights must sum to 1")
        uniform = bool(np.allclose(w, 1.0 / n, rtol=0.0, atol=_MARGINAL_TOL))
    mass = np.zeros((n, n))
    for k, s in enumerate(sigma):
        mass[k, s - 1] = w[k]
    return Permuton(resolution=n, mass=mass, marginal_check=uniform,
                    meta={"sigma": tuple(int(s) for s in sigma)})


def support_of(permuton: Permuton, threshold: float = 0.0) -> SupportSet:
    """Cells with mass strictly above the threshold."""
    if threshold < 0:
        raise ValueError(f"threshold must be nonnegative, got {threshold}")
    rows, cols = np.nonzero(permuton.mass > threshold)
    cells = frozenset((int(r), int(c)) for r, c in zip(rows, cols))
    return SupportSet(resolution=permuton.resolution, cells=cells)


def augment_support(support: SupportSet) -> AugmentedSupport:
    """Saturate a support under the shared-row/column product rule."""
    m = support.resolution
    if support.cells:
        arr = np.array(sorted(support.cells))
        data = np.ones(len(arr))
        adj = csr_matrix((data, (arr[:, 0], arr[:, 1] + m)), shape=(2 * m, 2 * m))
    else:  # unreachable through SupportSet, kept for safety
        adj = csr_matrix((2 * m, 2 * m))
    n_comp, labels = connected_components(adj, directed=False)
    row_groups = {}
    col_groups = {}
    for r in range(m):
        row_groups.setdefault(labels[r], []).append(r)
    for c in range(m):
        col_groups.setdefault(labels[m + c], []).append(c)
    # Components made of a lone row or a lone column cannot occur for a
    # valid support (each row and column holds a cell, so each label
    # seen on one side is seen on the other).
    keys = sorted(set(row_groups) | set(col_groups))
    rows_out = []
    cols_out = []
    cells = set()
    for key in keys:
        rows = tuple(row_groups.get(key, ()))
        cols = tuple(col_groups.get(key, ()))
        rows_out.append(rows)
        cols_out.append(cols)
        cells.update((r, c) for r in rows for c in cols)
    return AugmentedSupport(resolution=m, cells=frozenset(cells),
                            row_groups=tuple(rows_out), col_groups=tuple(cols_out))


# ---------------------------------------------------------------------------
# re-rooting
# ---------------------------------------------------------------------------


def reroot_permuton(permuton: Permuton, t: int,
                    shift: Optional[int] = None) -> Permuton:
    """Cyclically re-base both clocks at block ``t`` (0-based).

    The first coordinate is shifted by ``t`` blocks and the second by
    the block the permuton couples to ``t``: the column carrying the
    most mass in row ``t`` (ties to the smallest index), unless an
    explicit ``shift`` is given. ``t = 0`` is the identity exactly when
    row 0 couples to column 0.
    """
    m = permuton.resolution
    if not 0 <= t < m:
        raise ValueError(f"t must lie in [0, {m}), got {t}")
    if shift is None:
        row = permuton.mass[t]
        if not np.any(row > 0):
            raise ValueError(f"row {t} carries no mass, cannot infer its column")
        shift = int(np.argmax(row))
    elif not 0 <= shift < m:
        raise ValueError(f"shift must lie in [0, {m}), got {shift}")
    rolled = np.roll(permuton.mass, (-t, -shift), axis=(0, 1))
    meta = dict(permuton.meta)
    meta["reroot"] = (int(t), int(shift))
    return Permuton(resolution=m, mass=rolled,
                    marginal_check=permuton.marginal_check, meta=meta)
