"""Correlated walk pairs and the cell graphs they mate into.

A walk pair is two real walks ``L`` and ``R`` of the same length with
``L[0] = R[0] = 0``, thought of as the boundary-length processes of a
pair of trees glued along a common contour. Cell ``k`` (1-based, one
per step) carries the height interval between positions ``k-1`` and
``k`` of each walk.

Two cells ``x < y`` are mated into an edge when they are consecutive,
or when one of the walks stays above both cells' floors strictly
between them:

    max(min(W[x-1], W[x]), min(W[y-1], W[y])) <= min(W[x], ..., W[y-1])

for ``W`` either ``L`` or ``R``. Both walks contribute their edges and
the union is returned. The graph always contains the rank path, and
for walks with one walk monotone decreasing and the other increasing it
degenerates to exactly that path.

Two implementations are provided on purpose. ``mated_crt_graph`` runs
in time linear in ``n`` plus the number of edges by chasing
previous-weak-minimum chains; ``mated_crt_graph_bruteforce`` scans all
pairs with a running minimum. They must agree on every input and the
test suite holds them to that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Set, Tuple

import numpy as np

from .graphs import CellGraph

__all__ = [
    "WalkPair",
    "sample_walk_pair",
    "mated_crt_graph",
    "mated_crt_graph_bruteforce",
]


@dataclass(frozen=True)
class WalkPair:
    """Two coupled walks given by their positions, zero at time zero."""

    L: np.ndarray
    R: np.ndarray
    rho: Optional[float] = None
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        L = np.asarray(self.L, dtype=float)
        R = np.asarray(self.R, dtype=float)
        if L.ndim != 1 or R.ndim != 1 or L.shape != R.shape:
            raise ValueError("walks must be 1-d arrays of equal length")
        if len(L) < 2:
            raise ValueError("walks need at least one step")
        if L[0] != 0.0 or R[0] != 0.0:
            raise ValueError("walks must start at 0")
        if self.rho is not None and not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "R", R)

    @property
    def n_steps(self) -> int:
        return len(self.L) - 1

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"WalkPair(n={self.n_steps}, rho={self.rho})"


def sample_walk_pair(n: int, rho: float, seed=0, *, bridge: bool = True) -> WalkPair:
    """Sample an n-step Gaussian walk pair with increment correlation rho.

    Increments are ``dL = z1 / sqrt(n)`` and
    ``dR = (rho * z1 + sqrt(1 - rho^2) * z2) / sqrt(n)`` for independent
    standard normals, so each walk approximates a unit-time Brownian
    motion and the pair has the requested correlation. With ``bridge``
    the linear drift ``(k/n) * W[n]`` is removed from each walk, pinning
    both ends to zero.
    """
    if n < 1:
        raise ValueError(f"need at least one step, got n={n}")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    scale = 1.0 / math.sqrt(n)
    dL = z1 * scale
    dR = (rho * z1 + math.sqrt(1.0 - rho * rho) * z2) * scale
    L = np.concatenate(([0.0], np.cumsum(dL)))
    R = np.concatenate(([0.0], np.cumsum(dR)))
    if bridge:
        frac = np.arange(n + 1) / n
        L = L - frac * L[-1]
        R = R - frac * R[-1]
        L[-1] = 0.0
        R[-1] = 0.0
    return WalkPair(L=L, R=R, rho=rho, meta={"bridge": bridge})


def _cell_floors(W: np.ndarray) -> np.ndarray:
    """Floor of each cell: min of the walk at the cell's two ends."""
    return np.minimum(W[:-1], W[1:])


def _mate_one_walk(m: np.ndarray, edges: Set[Tuple[int, int]]) -> None:
    """Collect the non-consecutive mated edges of one walk.

    ``m`` holds 0-based cell floors. The key identity is that the walk
    minimum strictly between cells x and y equals the minimum floor of
    the cells strictly between them, so the mating condition reads

        max(m[x], m[y]) <= min(m[x+1], ..., m[y-1]).

    For fixed y the admissible x are exactly the nodes of the
    previous-weak-minimum chain started at y-1 (every floor between a
    chain node and its predecessor is strictly higher, so the running
    middle minimum at chain node c_{k+1} is the floor of c_k). Walking
    the chain and stopping once the middle minimum drops below m[y]
    visits each emitted edge once, which bounds the total work by the
    output size.
    """
    n = len(m)
    prev_le = np.empty(n, dtype=np.int64)
    stack = []
    for i in range(n):
        while stack and m[stack[-1]] > m[i]:
            stack.pop()
        prev_le[i] = stack[-1] if stack else -1
        stack.append(i)
    for y in range(2, n):
        c = y - 1
        while True:
            x = prev_le[c]
            if x < 0 or m[c] < m[y]:
                break
            edges.add((x + 1, y + 1))
            c = x


def mated_crt_graph(walks: WalkPair) -> CellGraph:
    """Mated cell graph of a walk pair, chain algorithm."""
    n = walks.n_steps
    edges: Set[Tuple[int, int]] = {(k, k + 1) for k in range(1, n)}
    _mate_one_walk(_cell_floors(walks.L), edges)
    _mate_one_walk(_cell_floors(walks.R), edges)
    return CellGraph(n=n, edges=frozenset(edges))


def mated_crt_graph_bruteforce(walks: WalkPair) -> CellGraph:
    """Mated cell graph by direct pair scan. Quadratic; kept as a cross-check."""
    n = walks.n_steps
    edges: Set[Tuple[int, int]] = {(k, k + 1) for k in range(1, n)}
    for m in (_cell_floors(walks.L), _cell_floors(walks.R)):
        for y in range(2, n):
            running = math.inf
            for x in range(y - 2, -1, -1):
                running = min(running, m[x + 1])
                if max(m[x], m[y]) <= running:
                    edges.add((x + 1, y + 1))
    return CellGraph(n=n, edges=frozenset(edges))
