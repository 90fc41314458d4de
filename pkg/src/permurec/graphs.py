"""Graphs on visit ranks.

Vertices are the integers ``1..n`` and usually stand for the ranks at
which a curve visits cells (or for the steps of a walk pair). Graphs
built from curves or walks satisfy a structural invariant: ranks ``k``
and ``k + 1`` are adjacent, because consecutive visits happen in
adjacent cells whatever the construction. That property belongs to the
constructors, not the type; the harmonic machinery also accepts plain
fixtures like stars and wheels. Edges are unordered pairs without
self-loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .curves import CellCurve

__all__ = [
    "CellGraph",
    "side_sharing_graph",
    "interval_subgraph",
    "components",
]


@dataclass(frozen=True)
class CellGraph:
    """Simple undirected graph on vertices 1..n."""

    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={self.n}")
        norm = set()
        for e in self.edges:
            a, b = e
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if a > b:
                a, b = b, a
            if not (1 <= a and b <= self.n):
                raise ValueError(f"edge ({a}, {b}) outside vertex range 1..{self.n}")
            norm.add((int(a), int(b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def has_rank_path(self) -> bool:
        """True when every pair of consecutive ranks is adjacent."""
        return all((k, k + 1) in self.edges for k in range(1, self.n))

    def has_edge(self, a: int, b: int) -> bool:
        if a > b:
            a, b = b, a
        return (a, b) in self.edges

    def neighbors(self, v: int) -> Tuple[int, ...]:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} outside 1..{self.n}")
        out = [b if a == v else a for a, b in self.edges if v in (a, b)]
        return tuple(sorted(out))

    def edge_list(self) -> Tuple[Tuple[int, int], ...]:
        """Edges as sorted pairs in lexicographic order (file order)."""
        return tuple(sorted(self.edges))

    def adjacency(self) -> csr_matrix:
        """0-based sparse adjacency matrix."""
        if not self.edges:
            return csr_matrix((self.n, self.n))
        arr = np.array(sorted(self.edges)) - 1
        rows = np.concatenate([arr[:, 0], arr[:, 1]])
        cols = np.concatenate([arr[:, 1], arr[:, 0]])
        data = np.ones(len(rows))
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"CellGraph(n={self.n}, edges={len(self.edges)})"


def side_sharing_graph(curve: CellCurve) -> CellGraph:
    """Graph joining ranks of cells that share a grid side.

    This is the ground-truth adjacency structure of the cell
    decomposition, labelled by the given curve's visit order.
    """
    ranks = curve._rank_index()
    edges = set()
    for (i, j), r in ranks.items():
        for ni, nj in ((i + 1, j), (i, j + 1)):
            other = ranks.get((ni, nj))
            if other is not None:
                a, b = r + 1, other + 1
                edges.add((a, b) if a < b else (b, a))
    return CellGraph(n=curve.n_cells, edges=frozenset(edges))


def interval_subgraph(graph: CellGraph, u: int, v: int) -> CellGraph:
    """Induced subgraph on ranks u..v, relabelled to 1..v-u+1.

    New vertex ``k`` stands for old vertex ``u + k - 1``. The path
    invariant survives because induced subgraphs of consecutive ranks
    keep their consecutive edges.
    """
    if not (1 <= u <= v <= graph.n):
        raise ValueError(f"interval [{u}, {v}] not inside 1..{graph.n}")
    shift = u - 1
    edges = frozenset((a - shift, b - shift)
                      for a, b in graph.edges if u <= a and b <= v)
    return CellGraph(n=v - u + 1, edges=edges)


def components(graph: CellGraph) -> Tuple[Tuple[int, ...], ...]:
    """Connected components as sorted 1-based vertex tuples.

    Graphs holding the path invariant are always connected; this is the
    check that says so.
    """
    n_comp, labels = connected_components(graph.adjacency(), directed=False)
    groups = [[] for _ in range(n_comp)]
    for idx, lab in enumerate(labels):
        groups[lab].append(idx + 1)
    return tuple(tuple(g) for g in sorted(groups))
