"""Intersection sets of curve ranks and structure recovered from them.

The central object records which visit ranks of a space-filling curve
touch each other in space: the pair ``(p, q)`` is present when the
closures of the cells visited at ranks ``p`` and ``q`` intersect. The
relation is symmetric and reflexive; pairs are stored sorted with the
full diagonal always included. A variant adds one virtual rank past the
end standing for everything outside the square, so that touching the
grid border becomes visible as an ordinary pair.

From the relation alone, with no access to cell coordinates, the
functions here recover:

* the coarse cell graph at a chosen block size (``graph_from_tm``),
* the ranks at which the curve pinches its past against its future
  (``cut_times``),
* the two boundary arcs of a rank interval and the closed walk around
  it (``boundary_bipartition``, ``boundary_path``).

These feed the harmonic embedding stage, which is the point of the
exercise: geometry is rebuilt from incidence data only.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np

from .curves import CellCurve
from .graphs import CellGraph
from .permutons import AugmentedSupport

__all__ = [
    "IntersectionSet",
    "TimeSet",
    "tm_oracle_from_curve",
    "tm_add_outer_frame",
    "tm_from_augmented",
    "graph_from_tm",
    "boundary_times",
    "cut_times",
    "boundary_bipartition",
    "boundary_path",
]


@dataclass(frozen=True)
class IntersectionSet:
    """Symmetric reflexive relation on ranks 1..n, stored as sorted pairs.

    The diagonal is added automatically; callers only supply the
    off-diagonal contacts they know about.
    """

    n: int
    pairs: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one rank, got n={self.n}")
        norm: Set[Tuple[int, int]] = set()
        for p, q in self.pairs:
            if p > q:
                p, q = q, p
            if not (1 <= p and q <= self.n):
                raise ValueError(f"pair ({p}, {q}) outside rank range 1..{self.n}")
            norm.add((int(p), int(q)))
        norm.update((k, k) for k in range(1, self.n + 1))
        object.__setattr__(self, "pairs", frozenset(norm))

    def has(self, p: int, q: int) -> bool:
        if p > q:
            p, q = q, p
        return (p, q) in self.pairs

    def pair_list(self) -> Tuple[Tuple[int, int], ...]:
        """All pairs in lexicographic order (file order)."""
        return tuple(sorted(self.pairs))

    def _neighbor_map(self) -> Dict[int, Set[int]]:
        """Rank -> set of distinct partners. Cached, diagonal excluded."""
        cached = self.__dict__.get("_nbrs")
        if cached is None:
            cached = {k: set() for k in range(1, self.n + 1)}
            for p, q in self.pairs:
                if p != q:
                    cached[p].add(q)
                    cached[q].add(p)
            object.__setattr__(self, "_nbrs", cached)
        return cached

    def __len__(self) -> int:
        return len(self.pairs)

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"IntersectionSet(n={self.n}, pairs={len(self.pairs)})"


@dataclass(frozen=True)
class TimeSet:
    """A sorted set of distinguished ranks out of 1..n."""

    n: int
    ranks: Tuple[int, ...]

    def __post_init__(self):
        rs = tuple(int(r) for r in self.ranks)
        if list(rs) != sorted(set(rs)):
            raise ValueError("ranks must be strictly increasing")
        if rs and not (1 <= rs[0] and rs[-1] <= self.n):
            raise ValueError(f"ranks must lie in 1..{self.n}")
        object.__setattr__(self, "ranks", rs)

    def __contains__(self, r) -> bool:
        return r in set(self.ranks)

    def __len__(self) -> int:
        return len(self.ranks)

    def __iter__(self):
        return iter(self.ranks)


# ---------------------------------------------------------------------------
# building intersection sets
# ---------------------------------------------------------------------------


def tm_oracle_from_curve(curve: CellCurve) -> IntersectionSet:
    """Ground-truth contact relation: ranks whose cell closures meet.

    Two cells' closures intersect exactly when the cells agree or are
    neighbours in the 8-cell sense (side or corner).
    """
    side = curve.side
    rk = np.empty((side, side), dtype=np.int64)
    for r, (i, j) in enumerate(curve.cells):
        rk[i, j] = r + 1
    pairs: Set[Tuple[int, int]] = set()
    shifted = (
        (rk[:-1, :], rk[1:, :]),      # east
        (rk[:, :-1], rk[:, 1:]),      # north
        (rk[:-1, :-1], rk[1:, 1:]),   # north-east corner
        (rk[:-1, 1:], rk[1:, :-1]),   # south-east corner
    )
    for a, b in shifted:
        lo = np.minimum(a, b).ravel()
        hi = np.maximum(a, b).ravel()
        pairs.update(zip(lo.tolist(), hi.tolist()))
    return IntersectionSet(n=curve.n_cells, pairs=frozenset(pairs))


def tm_add_outer_frame(tm: IntersectionSet, curve: CellCurve) -> IntersectionSet:
    """Adjoin a virtual rank n+1 touching every rank on the grid border.

    The virtual rank stands for the complement of the square; with it,
    the square's own boundary can be read off the relation the same way
    as any interior interface.
    """
    if tm.n != curve.n_cells:
        raise ValueError(f"relation has {tm.n} ranks but curve visits {curve.n_cells} cells")
    side = curve.side
    frame = tm.n + 1
    extra = set()
    for r, (i, j) in enumerate(curve.cells):
        if i == 0 or j == 0 or i == side - 1 or j == side - 1:
            extra.add((r + 1, frame))
    return IntersectionSet(n=frame, pairs=tm.pairs | extra)


def tm_from_augmented(aug: AugmentedSupport) -> IntersectionSet:
    """Rank pairs forced by a saturated support.

    Two rows related here share a column of the augmented support. The
    closure makes row groups complete, so the relation is the union of
    cliques, one per group, plus the diagonal.
    """
    pairs: Set[Tuple[int, int]] = set()
    for rows in aug.row_groups:
        for a, b in combinations(sorted(rows), 2):
            pairs.add((a + 1, b + 1))
    return IntersectionSet(n=aug.resolution, pairs=frozenset(pairs))


# ---------------------------------------------------------------------------
# block graph
# ---------------------------------------------------------------------------


def graph_from_tm(tm: IntersectionSet, n_blocks: int) -> CellGraph:
    """Coarse cell graph read off a finer contact relation.

    Ranks 1..N are grouped into ``n_blocks`` consecutive blocks of
    equal size (block ``x`` holds ranks ``(x-1)*k+1 .. x*k``). Distinct
    blocks x and y are joined when some fine rank touches both and
    nothing else: such a rank sits strictly inside the common interface
    of the two blocks, which is what distinguishes a shared side from a
    mere shared corner once the blocks are refined deep enough.
    Consecutive blocks are always joined.
    """
    N = tm.n
    if n_blocks < 1:
        raise ValueError(f"need at least one block, got {n_blocks}")
    if N % n_blocks != 0:
        raise ValueError(f"{N} ranks do not split into {n_blocks} equal blocks")
    k = N // n_blocks
    touched: List[Set[int]] = [set() for _ in range(N + 1)]
    for p, q in tm.pairs:
        bp = (p - 1) // k + 1
        bq = (q - 1) // k + 1
        touched[p].add(bq)
        touched[q].add(bp)
    edges: Set[Tuple[int, int]] = {(x, x + 1) for x in range(1, n_blocks)}
    for u in range(1, N + 1):
        s = touched[u]
        if len(s) == 2:
            a, b = sorted(s)
            edges.add((a, b))
    return CellGraph(n=n_blocks, edges=frozenset(edges))


# ---------------------------------------------------------------------------
# cut structure of an interval
# ---------------------------------------------------------------------------


def boundary_times(tm: IntersectionSet, u: int, v: int) -> TimeSet:
    """Ranks in [u, v] touching some rank outside [u, v]."""
    if not (1 <= u <= v <= tm.n):
        raise ValueError(f"interval [{u}, {v}] not inside 1..{tm.n}")
    hit = set()
    for p, q in tm.pairs:
        if p < u <= q <= v:
            hit.add(q)
        elif u <= p <= v < q:
            hit.add(p)
    return TimeSet(n=tm.n, ranks=tuple(sorted(hit)))


def cut_times(tm: IntersectionSet, u: int = 1, v: Optional[int] = None) -> TimeSet:
    """Ranks where the interval [u, v] pinches into two halves.

    An interior rank t is a cut when no contact joins the part of the
    interval before t to the part after it; the ends of the interval
    are cuts by convention. A relation containing only consecutive
    contacts has every rank cut; a relation filling a whole square
    keeps only the two ends.
    """
    if v is None:
        v = tm.n
    if not (1 <= u <= v <= tm.n):
        raise ValueError(f"interval [{u}, {v}] not inside 1..{tm.n}")
    blocked = np.zeros(v + 2, dtype=np.int64)
    for p, q in tm.pairs:
        if q - p >= 2 and p >= u and q <= v:
            blocked[p + 1] += 1
            blocked[q] -= 1
    level = np.cumsum(blocked)
    ranks = [t for t in range(u, v + 1) if t in (u, v) or level[t] == 0]
    return TimeSet(n=tm.n, ranks=tuple(ranks))


# ---------------------------------------------------------------------------
# boundary arcs
# ---------------------------------------------------------------------------


def _core_components(tm: IntersectionSet, u: int, v: int, eps: int,
                     outside: Set[int]) -> Optional[Tuple[Set[int], Set[int]]]:
    """Split the eps-inset boundary ranks by contact, if it gives two parts."""
    core = sorted(t for t in outside if u + eps <= t <= v - eps)
    if len(core) < 2:
        return None
    index = {t: i for i, t in enumerate(core)}
    parent = list(range(len(core)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    nbrs = tm._neighbor_map()
    for t in core:
        for q in nbrs[t]:
            j = index.get(q)
            if j is not None:
                ra, rb = find(index[t]), find(j)
                if ra != rb:
                    parent[ra] = rb
    groups: Dict[int, Set[int]] = {}
    for t in core:
        groups.setdefault(find(index[t]), set()).add(t)
    if len(groups) != 2:
        return None
    a, b = sorted(groups.values(), key=min)
    return a, b


def boundary_bipartition(tm: IntersectionSet, u: int, v: int,
                         eps: Optional[int] = None
                         ) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Split the boundary ranks of [u, v] into its two arcs.

    Away from the interval's ends the two arcs do not touch, so the
    boundary ranks at distance at least ``eps`` from either end fall
    into exactly two contact components. Those seed the arcs; the
    remaining boundary ranks (and the two ends themselves) are then
    attached round by round to whichever arc they touch, joining both
    when they touch both. With no ``eps`` given, the inset is swept
    from an eighth of the interval length down by halving until the
    two-component picture appears.

    Returns the arcs as sorted rank tuples, ordered by smallest member.
    """
    if not (1 <= u <= v <= tm.n):
        raise ValueError(f"interval [{u}, {v}] not inside 1..{tm.n}")
    if v - u < 2:
        raise ValueError("interval too short to have two boundary arcs")
    outside = set(boundary_times(tm, u, v).ranks)
    if eps is not None:
        if eps < 1:
            raise ValueError(f"eps must be positive, got {eps}")
        sweep = [eps]
    else:
        sweep = []
        e = max(1, -((u - v) // 8))  # ceil((v-u)/8)
        while e >= 1:
            sweep.append(e)
            if e == 1:
                break
            e //= 2
    split = None
    for e in sweep:
        split = _core_components(tm, u, v, e, outside)
        if split is not None:
            break
    if split is None:
        raise ValueError(
            f"boundary of [{u}, {v}] does not separate into two arcs at any inset")
    part1, part2 = split
    rest = (outside | {u, v}) - part1 - part2
    nbrs = tm._neighbor_map()
    while True:
        moved = False
        for t in sorted(rest):
            contacts = nbrs[t]
            in1 = t in part1
            in2 = t in part2
            if not in1 and contacts & part1:
                part1.add(t)
                moved = True
            if not in2 and contacts & part2:
                part2.add(t)
                moved = True
        rest = {t for t in rest if t not in part1 or t not in part2}
        if not moved:
            break
    unassigned = {t for t in rest if t not in part1 and t not in part2}
    if unassigned:
        raise ValueError(
            f"boundary ranks {sorted(unassigned)} touch neither arc of [{u}, {v}]")
    a, b = sorted((part1, part2), key=min)
    return tuple(sorted(a)), tuple(sorted(b))


def boundary_path(tm: IntersectionSet, u: int, v: int,
                  eps: Optional[int] = None) -> Tuple[int, ...]:
    """Closed walk around the boundary of [u, v].

    One arc is traversed in increasing rank order, the other in
    decreasing order, and the walk closes where it started. The arc
    whose private ranks start lower goes first, so the output is
    reproducible. Both interval ends must lie on both arcs.
    """
    part1, part2 = boundary_bipartition(tm, u, v, eps)
    s1, s2 = set(part1), set(part2)
    for end in (u, v):
        if end not in s1 or end not in s2:
            raise ValueError(f"interval end {end} does not lie on both boundary arcs")
    ex1 = s1 - s2
    ex2 = s2 - s1
    if not ex1 or not ex2:
        raise ValueError("boundary arcs coincide, no closed walk to extract")
    if min(ex1) > min(ex2):
        part1, part2 = part2, part1
    walk: List[int] = []
    for t in list(part1) + list(reversed(part2)):
        if not walk or walk[-1] != t:
            walk.append(t)
    if walk[0] != walk[-1]:
        raise ValueError("boundary walk failed to close")
    return tuple(walk)
