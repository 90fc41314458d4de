"""Space-filling grid curves and their mass parametrisations.

A grid curve visits every cell of the ``2**depth x 2**depth`` grid
exactly once, moving between side-adjacent cells. Two families are
built in:

* ``hilbert``: the classic self-similar open curve. At depth one it
  visits the quadrants in the order lower-left, upper-left,
  upper-right, lower-right, so it starts at cell ``(0, 0)`` and ends at
  ``(side-1, 0)``.
* ``moore``: a closed variant assembled from four rotated copies of the
  depth ``d-1`` Hilbert curve, one per quadrant. Defined for depth two
  and up; the last cell is side-adjacent to the first.

The eight symmetries of the square act on curves cell by cell. The
conjugate of a curve is its reflection across the horizontal midline
(``y`` runs the other way); conjugating both members of a curve pair
leaves every quantity derived from shared cells unchanged, which is one
of the pipeline's consistency checks.

Pairing a curve with a grid measure produces a timed curve: cell at
rank ``r`` is traversed during a time interval whose length is the
cell's mass, so the curve pushes Lebesgue measure on ``[0, 1]`` forward
to the measure on the square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .measures import GridMeasure

__all__ = [
    "CURVE_KINDS",
    "SYMMETRIES",
    "CellCurve",
    "TimedCurve",
    "build_curve",
    "apply_symmetry",
    "conjugate",
    "mass_parametrize",
    "induced_permutation",
]

CURVE_KINDS = ("hilbert", "moore")

# name -> map on (x, y) given grid side m
SYMMETRIES = {
    "identity": lambda x, y, m: (x, y),
    "rot90": lambda x, y, m: (m - 1 - y, x),
    "rot180": lambda x, y, m: (m - 1 - x, m - 1 - y),
    "rot270": lambda x, y, m: (y, m - 1 - x),
    "mirror_h": lambda x, y, m: (x, m - 1 - y),
    "mirror_v": lambda x, y, m: (m - 1 - x, y),
    "mirror_main": lambda x, y, m: (y, x),
    "mirror_anti": lambda x, y, m: (m - 1 - y, m - 1 - x),
}


@dataclass(frozen=True)
class CellCurve:
    """A space-filling visit order on the dyadic grid.

    ``cells[r]`` is the cell visited at rank ``r`` (0-based internally;
    file formats and public rank arguments elsewhere are 1-based).
    """

    depth: int
    cells: Tuple[Tuple[int, int], ...]
    kind: str
    closed: bool = False

    def __post_init__(self):
        side = 2**self.depth
        n = side * side
        if len(self.cells) != n:
            raise ValueError(f"curve must visit all {n} cells, got {len(self.cells)}")
        seen = set(self.cells)
        if len(seen) != n:
            raise ValueError("curve revisits a cell")
        for i, j in self.cells:
            if not (0 <= i < side and 0 <= j < side):
                raise ValueError(f"cell ({i}, {j}) outside the grid")
        pairs = zip(self.cells, self.cells[1:])
        for (a, b), (c, d) in pairs:
            if abs(a - c) + abs(b - d) != 1:
                raise ValueError(f"cells ({a},{b}) and ({c},{d}) are not side-adjacent")
        if self.closed:
            (a, b), (c, d) = self.cells[-1], self.cells[0]
            if abs(a - c) + abs(b - d) != 1:
                raise ValueError("closed curve must end next to its start")

    @property
    def side(self) -> int:
        return 2**self.depth

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def rank_of(self, i: int, j: int) -> int:
        """0-based rank at which cell ``(i, j)`` is visited."""
        return self._rank_index()[(i, j)]

    def _rank_index(self) -> Dict[Tuple[int, int], int]:
        cached = self.__dict__.get("_ranks")
        if cached is None:
            cached = {cell: r for r, cell in enumerate(self.cells)}
            object.__setattr__(self, "_ranks", cached)
        return cached

    def __repr__(self):  # pragma: no cover - cosmetic
        tail = ", closed" if self.closed else ""
        return f"CellCurve(depth={self.depth}, kind={self.kind!r}{tail})"


def _hilbert_cell(depth: int, d: int) -> Tuple[int, int]:
    """Cell visited at 0-based rank d by the depth-``depth`` Hilbert curve."""
    x = y = 0
    t = d
    s = 1
    side = 2**depth
    while s < side:
        rx = 1 & (t // 2)
        ry = 1 & (t ^ rx)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        t //= 4
        s *= 2
    return x, y


def _build_hilbert(depth: int) -> CellCurve:
    n = 4**depth
    cells = tuple(_hilbert_cell(depth, d) for d in range(n))
    return CellCurve(depth=depth, cells=cells, kind="hilbert", closed=False)


def _build_moore(depth: int) -> CellCurve:
    if depth < 2:
        raise ValueError("moore curve needs depth >= 2")
    h = 2 ** (depth - 1)
    sub = _build_hilbert(depth - 1).cells
    cells = []
    # Four quadrant copies, traversed lower-left, upper-left,
    # upper-right, lower-right. The left pair is rotated a quarter turn
    # counter-clockwise, the right pair clockwise; junction cells and
    # the wrap-around then land side by side automatically.
    cells.extend((h - 1 - y, x) for x, y in sub)
    cells.extend((h - 1 - y, x + h) for x, y in sub)
    cells.extend((y + h, 2 * h - 1 - x) for x, y in sub)
    cells.extend((y + h, h - 1 - x) for x, y in sub)
    return CellCurve(depth=depth, cells=tuple(cells), kind="moore", closed=True)


def build_curve(kind: str, depth: int) -> CellCurve:
    """Construct a built-in curve family member."""
    if kind not in CURVE_KINDS:
        raise ValueError(f"unknown curve kind {kind!r}; expected one of {CURVE_KINDS}")
    if not 1 <= depth <= 12:
        raise ValueError(f"depth must be in [1, 12], got {depth}")
    if kind == "hilbert":
        return _build_hilbert(depth)
    return _build_moore(depth)


def apply_symmetry(curve: CellCurve, name: str) -> CellCurve:
    """Act on a curve with one of the eight symmetries of the square.

    Symmetries preserve side-adjacency, so the result is again a valid
    curve; its kind records the transformation.
    """
    if name not in SYMMETRIES:
        raise ValueError(f"unknown symmetry {name!r}; expected one of {sorted(SYMMETRIES)}")
    f = SYMMETRIES[name]
    m = curve.side
    cells = tuple(f(x, y, m) for x, y in curve.cells)
    return CellCurve(depth=curve.depth, cells=cells, kind=f"{curve.kind}|{name}",
                     closed=curve.closed)


def conjugate(curve: CellCurve) -> CellCurve:
    """Reflection across the horizontal midline: cell (i, j) -> (i, side-1-j)."""
    return apply_symmetry(curve, "mirror_h")


@dataclass(frozen=True)
class TimedCurve:
    """A curve together with the measure it is parametrised by.

    ``breaks`` has one more entry than there are cells; the cell at
    rank ``r`` is traversed during ``[breaks[r], breaks[r+1]]``. The
    first break is 0 and the last is pinned to exactly 1.
    """

    curve: CellCurve
    measure: GridMeasure
    breaks: np.ndarray = field(compare=False)

    def __post_init__(self):
        if self.curve.depth != self.measure.depth:
            raise ValueError("curve and measure depths differ")
        b = np.asarray(self.breaks, dtype=float)
        if b.shape != (self.curve.n_cells + 1,):
            raise ValueError("breaks must have one entry per cell boundary")
        if b[0] != 0.0 or b[-1] != 1.0:
            raise ValueError("breaks must start at 0 and end at 1")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breaks must be strictly increasing")
        object.__setattr__(self, "breaks", b)

    @property
    def depth(self) -> int:
        return self.curve.depth

    def weight(self, rank: int) -> float:
        """Duration of the visit at 0-based rank."""
        return float(self.breaks[rank + 1] - self.breaks[rank])

    def interval_of_rank(self, rank: int) -> Tuple[float, float]:
        return float(self.breaks[rank]), float(self.breaks[rank + 1])

    def interval_of_cell(self, i: int, j: int) -> Tuple[float, float]:
        return self.interval_of_rank(self.curve.rank_of(i, j))

    def cell_at_time(self, t: float) -> Tuple[int, int]:
        """Cell being traversed at time t in [0, 1].

        Break times belong to the later of the two visits they separate,
        except t = 1 which belongs to the last.
        """
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"time {t!r} outside [0, 1]")
        r = int(np.searchsorted(self.breaks, t, side="right")) - 1
        r = min(r, self.curve.n_cells - 1)
        return self.curve.cells[r]

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"TimedCurve({self.curve!r}, measure={self.measure.kind!r})"


def mass_parametrize(curve: CellCurve, measure: GridMeasure) -> TimedCurve:
    """Run the curve at unit mass speed through the given measure."""
    if curve.depth != measure.depth:
        raise ValueError(
            f"curve depth {curve.depth} does not match measure depth {measure.depth}")
    w = np.array([measure.mass[i, j] for i, j in curve.cells])
    breaks = np.concatenate(([0.0], np.cumsum(w)))
    breaks[-1] = 1.0  # pin away the cumsum rounding
    return TimedCurve(curve=curve, measure=measure, breaks=breaks)


def induced_permutation(first: TimedCurve, second: TimedCurve
                        ) -> Tuple[Tuple[int, ...], np.ndarray]:
    """Permutation matching visit ranks of one curve to the other.

    Both timed curves must share a measure. Returns a 1-based
    permutation ``sigma`` with ``sigma[k-1]`` the rank at which the
    second curve visits the cell the first curve visits at rank ``k``,
    together with the cell masses in first-curve order.
    """
    if first.measure is not second.measure and not np.array_equal(
            first.measure.mass, second.measure.mass):
        raise ValueError("timed curves must be parametrised by the same measure")
    if first.depth != second.depth:
        raise ValueError("timed curves must live on the same grid")
    ranks2 = second.curve._rank_index()
    sigma = tuple(ranks2[cell] + 1 for cell in first.curve.cells)
    weights = np.diff(first.breaks)
    return sigma, weights
