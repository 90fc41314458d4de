"""Harmonic measure and circle-pinned harmonic embeddings.

The boundary of a rank interval, once recovered as a closed walk, is
laid out on the unit circle so that arc length equals harmonic measure
seen from a marked interior vertex: walk entry ``k`` goes to
``exp(2*pi*i*p[k])`` where ``p`` is the prefix sum of first-hit
probabilities along the walk. Interior vertices are then placed at the
average of their neighbours, one sparse linear problem per coordinate.

First-hit probabilities come from a single symmetric positive definite
solve. Writing ``D`` for the diagonal of interior degrees and ``A`` for
the interior-interior adjacency block, the vector ``w`` solving
``(D - A) w = e_x`` turns into the probability of exiting through
boundary vertex ``b`` as the sum of ``w`` over interior neighbours of
``b``. A seeded Monte Carlo estimator of the same distribution is kept
alongside as an independent check; the two must agree within binomial
noise everywhere they are compared.

If a vertex appears several times in the boundary walk (a pinch), all
of its mass is charged to the first appearance and its circle position
is taken from there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import cg

from .graphs import CellGraph

__all__ = [
    "TutteEmbedding",
    "marked_rank",
    "harmonic_measure",
    "mc_harmonic_oracle",
    "tutte_embedding",
    "align_embeddings",
]

_CIRCLE_TOL = 1e-9
DENSE_LIMIT = 2000


def marked_rank(n: int) -> int:
    """Default marked interior vertex: the middle rank, upper median."""
    if n < 1:
        raise ValueError(f"need at least one vertex, got {n}")
    return (n + 1) // 2


@dataclass(frozen=True, eq=False)
class TutteEmbedding:
    """Vertex positions in the closed unit disk.

    ``positions[v-1]`` is the complex position of vertex ``v``.
    ``boundary_cycle`` is the closed walk the circle order came from.
    """

    graph: CellGraph
    positions: np.ndarray
    boundary_cycle: Tuple[int, ...]
    residual: float
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=complex)
        if pos.shape != (self.graph.n,):
            raise ValueError(f"positions must cover all {self.graph.n} vertices")
        on_circle = set(self.boundary_cycle)
        for v in range(1, self.graph.n + 1):
            r = abs(pos[v - 1])
            if v in on_circle:
                if abs(r - 1.0) > _CIRCLE_TOL:
                    raise ValueError(f"boundary vertex {v} off the unit circle: |z|={r!r}")
            elif r >= 1.0:
                raise ValueError(f"interior vertex {v} outside the open disk: |z|={r!r}")
        object.__setattr__(self, "positions", pos)

    def position(self, v: int) -> complex:
        return complex(self.positions[v - 1])

    def __repr__(self):  # pragma: no cover - cosmetic
        return (f"TutteEmbedding(n={self.graph.n}, "
                f"boundary={len(set(self.boundary_cycle))}, residual={self.residual:.3e})")


def _split_boundary(graph: CellGraph, boundary: Sequence[int]) -> Tuple[
        Tuple[int, ...], np.ndarray, np.ndarray]:
    """Walk without its closing repeat, plus interior/boundary index maps."""
    walk = tuple(int(b) for b in boundary)
    if len(walk) >= 2 and walk[0] == walk[-1]:
        walk = walk[:-1]
    if not walk:
        raise ValueError("boundary walk is empty")
    bset = set(walk)
    for b in bset:
        if not 1 <= b <= graph.n:
            raise ValueError(f"boundary vertex {b} outside 1..{graph.n}")
    interior = np.array([v for v in range(1, graph.n + 1) if v not in bset],
                        dtype=np.int64)
    return walk, interior, np.array(sorted(bset), dtype=np.int64)


def _interior_system(graph: CellGraph, interior: np.ndarray) -> csr_matrix:
    """The SPD matrix D - A restricted to interior vertices."""
    where = {int(v): k for k, v in enumerate(interior)}
    rows, cols, data = [], [], []
    deg = np.zeros(len(interior))
    for a, b in graph.edges:
        ia = where.get(a)
        ib = where.get(b)
        if ia is not None:
            deg[ia] += 1
        if ib is not None:
            deg[ib] += 1
        if ia is not None and ib is not None:
            rows.extend((ia, ib))
            cols.extend((ib, ia))
            data.extend((-1.0, -1.0))
    m = len(interior)
    lap = csr_matrix((data, (rows, cols)), shape=(m, m))
    return lap + csr_matrix((deg, (np.arange(m), np.arange(m))), shape=(m, m))


def _first_hit_probabilities(graph: CellGraph, x: int,
                             walk: Sequence[int], interior: np.ndarray
                             ) -> Tuple[np.ndarray, int]:
    """Hit probability per distinct boundary vertex of the walk.

    Returns probabilities aligned with ``sorted(set(walk))`` plus the
    solver iteration count (0 for the dense route).
    """
    where = {int(v): k for k, v in enumerate(interior)}
    if x not in where:
        raise ValueError(f"marked vertex {x} must be interior to the boundary walk")
    system = _interior_system(graph, interior)
    rhs = np.zeros(len(interior))
    rhs[where[x]] = 1.0
    iters = 0
    if len(interior) < DENSE_LIMIT:
        w = np.linalg.solve(system.toarray(), rhs)
    else:
        w, iters = _cg_solve(system, rhs)
    bset = sorted(set(walk))
    probs = np.zeros(len(bset))
    for k, b in enumerate(bset):
        for v in graph.neighbors(b):
            idx = where.get(v)
            if idx is not None:
                probs[k] += w[idx]
    total = probs.sum()
    if not total > 0:
        raise ValueError("no probability reached the boundary; graph disconnected?")
    return probs / total, iters


def _cg_solve(system: csr_matrix, rhs: np.ndarray) -> Tuple[np.ndarray, int]:
    count = 0

    def bump(_):
        nonlocal count
        count += 1

    try:
        sol, info = cg(system, rhs, rtol=1e-10, atol=0.0, callback=bump)
    except TypeError:  # older scipy spells the tolerance differently
        sol, info = cg(system, rhs, tol=1e-10, atol=0.0, callback=bump)
    if info != 0:
        raise ValueError(f"conjugate gradient did not converge (info={info})")
    return sol, count


def harmonic_measure(graph: CellGraph, x: int, boundary: Sequence[int]) -> np.ndarray:
    """Prefix first-hit probabilities along a boundary walk.

    Entry ``k`` is the chance that simple random walk from ``x`` is
    absorbed at one of the first ``k+1`` walk entries. The sequence is
    nondecreasing and its last entry is exactly 1. Mass of a repeated
    vertex counts at its first appearance only.
    """
    walk, interior, bset = _split_boundary(graph, boundary)
    probs, _ = _first_hit_probabilities(graph, x, walk, interior)
    lookup = {int(b): probs[k] for k, b in enumerate(bset)}
    inc = np.zeros(len(walk))
    seen = set()
    for k, b in enumerate(walk):
        if b not in seen:
            inc[k] = lookup[b]
            seen.add(b)
    prefix = np.cumsum(inc)
    prefix[-1] = 1.0
    return prefix


def mc_harmonic_oracle(graph: CellGraph, x: int, boundary: Sequence[int],
                       walks: int, seed: int = 0) -> np.ndarray:
    """Empirical prefix first-hit probabilities from seeded random walks.

    Same output convention as the exact routine. Intended as an
    independent numerical witness, not for production use.
    """
    if walks < 1:
        raise ValueError(f"need at least one walk, got {walks}")
    walk, interior, bset = _split_boundary(graph, boundary)
    if x in set(walk):
        raise ValueError(f"marked vertex {x} must be interior to the boundary walk")
    nbrs = [np.array([], dtype=np.int64)]
    nbrs += [np.array(graph.neighbors(v), dtype=np.int64) for v in range(1, graph.n + 1)]
    deg = np.array([len(a) for a in nbrs], dtype=np.int64)
    flat = np.concatenate(nbrs)
    offsets = np.concatenate(([0], np.cumsum(deg)))
    is_boundary = np.zeros(graph.n + 1, dtype=bool)
    for b in set(walk):
        is_boundary[b] = True
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pos = np.full(walks, x, dtype=np.int64)
    hits = np.zeros(graph.n + 1, dtype=np.int64)
    active = np.arange(walks)
    max_steps = 1000 * graph.n * graph.n
    for _ in range(max_steps):
        if len(active) == 0:
            break
        cur = pos[active]
        step = rng.integers(0, deg[cur])
        pos[active] = flat[offsets[cur] + step]
        landed = is_boundary[pos[active]]
        if np.any(landed):
            arrived = pos[active[landed]]
            np.add.at(hits, arrived, 1)
            active = active[~landed]
    if len(active):
        raise RuntimeError("random walks failed to reach the boundary")
    inc = np.zeros(len(walk))
    seen = set()
    for k, b in enumerate(walk):
        if b not in seen:
            inc[k] = hits[b] / walks
            seen.add(b)
    prefix = np.cumsum(inc)
    prefix[-1] = 1.0
    return prefix


def tutte_embedding(graph: CellGraph, pstar: Sequence[int],
                    x: Optional[int] = None, tol: float = 1e-10) -> TutteEmbedding:
    """Embed with the boundary walk on the circle and the rest harmonic.

    ``pstar`` is a boundary walk (closed walks may repeat their first
    vertex at the end). ``x`` defaults to the middle rank and must be
    interior. Interior positions satisfy the mean-value property up to
    ``tol``; the attained residual is recorded on the result.
    """
    walk, interior, bset = _split_boundary(graph, pstar)
    if x is None:
        x = marked_rank(graph.n)
    probs, iters = _first_hit_probabilities(graph, x, walk, interior)
    lookup = {int(b): probs[k] for k, b in enumerate(bset)}
    inc = np.zeros(len(walk))
    seen = set()
    for k, b in enumerate(walk):
        if b not in seen:
            inc[k] = lookup[b]
            seen.add(b)
    prefix = np.cumsum(inc)
    prefix[-1] = 1.0
    positions = np.zeros(graph.n, dtype=complex)
    placed = set()
    for k, b in enumerate(walk):
        if b not in placed:
            positions[b - 1] = np.exp(2j * math.pi * prefix[k])
            placed.add(b)
    if len(interior):
        where = {int(v): k for k, v in enumerate(interior)}
        system = _interior_system(graph, interior)
        rhs = np.zeros((len(interior), 2))
        for a, b in graph.edges:
            for inside, outside in ((a, b), (b, a)):
                idx = where.get(inside)
                if idx is not None and outside not in where:
                    z = positions[outside - 1]
                    rhs[idx, 0] += z.real
                    rhs[idx, 1] += z.imag
        if len(interior) < DENSE_LIMIT:
            sol = np.linalg.solve(system.toarray(), rhs)
        else:
            sol_re, it_re = _cg_solve(system, rhs[:, 0])
            sol_im, it_im = _cg_solve(system, rhs[:, 1])
            sol = np.stack([sol_re, sol_im], axis=1)
            iters += it_re + it_im
        positions[interior - 1] = sol[:, 0] + 1j * sol[:, 1]
    residual = 0.0
    for v in interior:
        nb = graph.neighbors(int(v))
        mean = sum(positions[u - 1] for u in nb) / len(nb)
        residual = max(residual, float(abs(positions[v - 1] - mean)))
    if residual > tol:
        raise ValueError(f"harmonicity residual {residual!r} exceeds tolerance {tol!r}")
    cycle = tuple(int(b) for b in pstar)
    return TutteEmbedding(graph=graph, positions=positions, boundary_cycle=cycle,
                          residual=float(residual),
                          meta={"solver_iters": iters, "x": int(x), "prefix": prefix})


def _as_positions(obj: Union[TutteEmbedding, np.ndarray, Sequence[complex]]
                  ) -> np.ndarray:
    if isinstance(obj, TutteEmbedding):
        return obj.positions
    return np.asarray(obj, dtype=complex)


def align_embeddings(a, b) -> Tuple[float, bool, float]:
    """Best rotation (and optional reflection) taking ``a`` onto ``b``.

    Returns ``(angle, conjugated, rms)`` minimizing the root mean
    square discrepancy of ``b`` against ``exp(i*angle) * a`` or, with
    the flag set, against ``exp(i*angle) * conj(a)``. Ties keep the
    flag unset.
    """
    pa = _as_positions(a)
    pb = _as_positions(b)
    if pa.shape != pb.shape:
        raise ValueError("embeddings must share a vertex set")
    if pa.size < 2:
        raise ValueError("need at least two common vertices to align")
    best = None
    for flag in (False, True):
        ref = np.conj(pa) if flag else pa
        t = np.vdot(ref, pb)  # sum of conj(ref) * pb
        rot = t / abs(t) if abs(t) > 0 else 1.0 + 0j
        rms = float(np.sqrt(np.mean(np.abs(pb - rot * ref) ** 2)))
        angle = float(np.angle(rot))
        if best is None or rms < best[2]:
            best = (angle, flag, rms)
    return best
