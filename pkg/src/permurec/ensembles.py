"""Exhaustive small-size permutation ensembles and re-rooting.

Meandric permutations come from closed meanders: a single closed curve
crossing a horizontal line at ``2n`` points. A meander is encoded as a
pair of noncrossing perfect matchings (arches above the line, arches
below), and the pair qualifies when the alternating walk through the
arches visits all ``2n`` crossings, forming one loop. The permutation
reads off the crossing labels in the order the curve visits them.

Closed curves have no distinguished start, so a convention pins one:
the visit sequence starts at crossing 1 along its upper arch and is
then rotated so the final entry is the rightmost crossing ``2n``. With
that convention the ensemble is stable as a multiset under the cyclic
re-rooting map below. Whether rows of the induced permutation should
index curve order or line order differs between sources; both are
available through ``index_by``.

Baxter permutations are recognised by the adjacent-pair characterisation
of the two forbidden vincular patterns. For a descent pair
``sigma(j) > sigma(j+1)``, an occurrence of 2-41-3 exists exactly when
some earlier value inside the open value interval of the pair lies
below some later value inside that interval; the ascent case (3-14-2)
is the mirror statement. Scanning each adjacent pair once with running
interval extrema gives a quadratic check, cross-tested against a
literal four-index scan in the suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

__all__ = [
    "PermutationEnsemble",
    "noncrossing_matchings",
    "single_cycle",
    "enumerate_meanders",
    "is_baxter",
    "enumerate_baxter",
    "enumerate_all",
    "sample_baxter",
    "reroot_permutation",
]

MEANDER_LIMIT = 7
BAXTER_SAMPLE_LIMIT = 12


@dataclass(frozen=True)
class PermutationEnsemble:
    """A finite family of distinct permutations of {1..n}."""

    n: int
    members: Tuple[Tuple[int, ...], ...]
    kind: str

    def __post_init__(self):
        if self.kind not in ("meandric", "baxter", "all"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        want = list(range(1, self.n + 1))
        for sigma in self.members:
            if sorted(sigma) != want:
                raise ValueError(f"{sigma} is not a permutation of 1..{self.n}")
        if len(set(self.members)) != len(self.members):
            raise ValueError("ensemble members must be distinct")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        return iter(self.members)

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"PermutationEnsemble(n={self.n}, kind={self.kind!r}, size={len(self.members)})"


# ---------------------------------------------------------------------------
# meanders
# ---------------------------------------------------------------------------


def noncrossing_matchings(n_pairs: int) -> List[Dict[int, int]]:
    """All noncrossing perfect matchings of points 1..2*n_pairs.

    Point 1 must pair with an even point 2k, splitting the rest into an
    inner and an outer block that are matched independently. The count
    is the n-th Catalan number.
    """
    if n_pairs < 0:
        raise ValueError("pair count cannot be negative")

    def build(points: Tuple[int, ...]) -> List[List[Tuple[int, int]]]:
        if not points:
            return [[]]
        first = points[0]
        out = []
        for idx in range(1, len(points), 2):
            mate = points[idx]
            inner = points[1:idx]
            outer = points[idx + 1:]
            for left in build(inner):
                for right in build(outer):
                    out.append([(first, mate)] + left + right)
        return out

    result = []
    for pairs in build(tuple(range(1, 2 * n_pairs + 1))):
        match: Dict[int, int] = {}
        for a, b in pairs:
            match[a] = b
            match[b] = a
        result.append(match)
    return result


def single_cycle(upper: Dict[int, int], lower: Dict[int, int]) -> bool:
    """Whether the two arch systems close up into one loop.

    Follows the alternating walk from crossing 1; every crossing has
    one arch on each side, so the walk decomposes the crossings into
    loops whose arch count equals their crossing count. The walk is
    back at its starting state once it returns to crossing 1 about to
    leave along the upper arch again.
    """
    n2 = len(upper)
    at = 1
    use_upper = True
    steps = 0
    while True:
        at = upper[at] if use_upper else lower[at]
        use_upper = not use_upper
        steps += 1
        if at == 1 and use_upper:
            return steps == n2


def _visit_sequence(upper: Dict[int, int], lower: Dict[int, int]) -> List[int]:
    seq = [1]
    use_upper = True
    n2 = len(upper)
    while len(seq) < n2:
        nxt = upper[seq[-1]] if use_upper else lower[seq[-1]]
        seq.append(nxt)
        use_upper = not use_upper
    return seq


def enumerate_meanders(n: int, index_by: str = "curve") -> PermutationEnsemble:
    """All meandric permutations of size 2n, exhaustively.

    ``index_by`` chooses the row convention: ``curve`` lists the line
    labels in curve order, ``line`` the curve order by line label (the
    inverse permutation).
    """
    if not 1 <= n <= MEANDER_LIMIT:
        raise ValueError(f"exhaustive meanders need 1 <= n <= {MEANDER_LIMIT}, got {n}")
    if index_by not in ("curve", "line"):
        raise ValueError(f"index_by must be 'curve' or 'line', got {index_by!r}")
    matchings = noncrossing_matchings(n)
    members = set()
    n2 = 2 * n
    for upper in matchings:
        for lower in matchings:
            seq = _visit_sequence(upper, lower)
            if len(set(seq)) != n2:
                continue
            pivot = seq.index(n2)
            rotated = seq[pivot + 1:] + seq[:pivot + 1]
            if index_by == "line":
                inv = [0] * n2
                for pos, label in enumerate(rotated, start=1):
                    inv[label - 1] = pos
                members.add(tuple(inv))
            else:
                members.add(tuple(rotated))
    return PermutationEnsemble(n=n2, members=tuple(sorted(members)), kind="meandric")


# ---------------------------------------------------------------------------
# Baxter permutations
# ---------------------------------------------------------------------------


def is_baxter(sigma: Sequence[int]) -> bool:
    """True when sigma avoids the vincular patterns 2-41-3 and 3-14-2."""
    n = len(sigma)
    for j in range(n - 1):
        lo, hi = sigma[j], sigma[j + 1]
        descent = lo > hi
        if descent:
            lo, hi = hi, lo
        left_min = None
        left_max = None
        for a in sigma[:j]:
            if lo < a < hi:
                left_min = a if left_min is None else min(left_min, a)
                left_max = a if left_max is None else max(left_max, a)
        right_min = None
        right_max = None
        for c in sigma[j + 2:]:
            if lo < c < hi:
                right_min = c if right_min is None else min(right_min, c)
                right_max = c if right_max is None else max(right_max, c)
        if descent:
            if left_min is not None and right_max is not None and left_min < right_max:
                return False
        else:
            if left_max is not None and right_min is not None and left_max > right_min:
                return False
    return True


def _all_permutations(n: int) -> Iterator[Tuple[int, ...]]:
    return permutations(range(1, n + 1))


def enumerate_all(n: int) -> PermutationEnsemble:
    """Every permutation of {1..n}. Exhaustive, so keep n small."""
    if not 1 <= n <= 9:
        raise ValueError(f"full enumeration supported for 1 <= n <= 9, got {n}")
    return PermutationEnsemble(n=n, members=tuple(_all_permutations(n)), kind="all")


def enumerate_baxter(n: int) -> PermutationEnsemble:
    """All Baxter permutations of {1..n} by exhaustive filtering."""
    if not 1 <= n <= 9:
        raise ValueError(f"exhaustive Baxter filter supported for 1 <= n <= 9, got {n}")
    members = tuple(s for s in _all_permutations(n) if is_baxter(s))
    return PermutationEnsemble(n=n, members=members, kind="baxter")


def sample_baxter(n: int, count: int, seed=0) -> List[Tuple[int, ...]]:
    """Uniform Baxter permutations by rejection from S_n.

    Rejection is fine at these sizes; the cap keeps the acceptance rate
    workable. Samples may repeat.
    """
    if not 1 <= n <= BAXTER_SAMPLE_LIMIT:
        raise ValueError(f"rejection sampling capped at n <= {BAXTER_SAMPLE_LIMIT}, got {n}")
    if count < 1:
        raise ValueError(f"need a positive sample count, got {count}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out: List[Tuple[int, ...]] = []
    while len(out) < count:
        sigma = tuple(int(v) + 1 for v in rng.permutation(n))
        if is_baxter(sigma):
            out.append(sigma)
    return out


# ---------------------------------------------------------------------------
# re-rooting
# ---------------------------------------------------------------------------


def reroot_permutation(sigma: Sequence[int], i: int) -> Tuple[int, ...]:
    """Cyclic double shift: positions by i, values by sigma(i).

    tau(j) = ((sigma((j + i - 1) mod n + 1) - sigma(i) - 1) mod n) + 1.
    Choosing i = n leaves any sigma with sigma(n) = n unchanged, and
    composing shifts adds their roots modulo n.
    """
    n = len(sigma)
    if not 1 <= i <= n:
        raise ValueError(f"root index must lie in 1..{n}, got {i}")
    base = sigma[i - 1]
    return tuple(((sigma[(j + i - 1) % n] - base - 1) % n) + 1
                 for j in range(1, n + 1))
