"""End-to-end pipelines gluing the library stages together.

Each pipeline consumes a :class:`~permurec.config.RunConfig`, writes its
artifacts into ``config.out_dir()``, and returns the report dictionary that
was also serialized as ``report.json``.  A failed invariant is recorded in
the report before :class:`PipelineError` is raised, so the on-disk report
always tells the whole story even for aborted runs.

The recovery chain walks the full arc: build a measure and a curve pair,
read off the permuton and its support, close the support into a product
structure, derive the induced rank relation, cross-check the cell graph
reconstructed from a refined contact relation against plain side sharing,
extract cut times and the boundary walk, embed harmonically, and finally
recover the log-density field from ball masses.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import io as pio
from .config import RunConfig
from .curves import (
    CellCurve,
    TimedCurve,
    apply_symmetry,
    build_curve,
    mass_parametrize,
)
from .embedding import (
    TutteEmbedding,
    align_embeddings,
    harmonic_measure,
    marked_rank,
    mc_harmonic_oracle,
    tutte_embedding,
)
from .ensembles import (
    enumerate_all,
    enumerate_baxter,
    enumerate_meanders,
    reroot_permutation,
)
from .figures import curve_figure, embedding_figure, field_figure, measure_figure
from .graphs import CellGraph, side_sharing_graph
from .intersections import (
    boundary_bipartition,
    boundary_path,
    boundary_times,
    cut_times,
    graph_from_tm,
    tm_add_outer_frame,
    tm_from_augmented,
    tm_oracle_from_curve,
)
from .measures import build_measure, coupling_rho, log_mass_field
from .permutons import (
    SupportSet,
    augment_support,
    permuton_from_pair,
    support_of,
)
from .rng import stage_rng
from .walks import mated_crt_graph, mated_crt_graph_bruteforce, sample_walk_pair

__all__ = [
    "PipelineError",
    "run_pipeline",
    "run_stage",
    "support_chain_sets",
    "cascade_recovery_error",
    "embedding_distortion",
    "normalized_cell_centers",
    "mc_harmonic_parallel",
]


class PipelineError(RuntimeError):
    """An invariant failed mid-pipeline.

    Carries the stage name and the human-readable invariant so the CLI can
    print a pointed message and exit with the invariant-failure code.
    """

    def __init__(self, stage: str, invariant: str):
        self.stage = stage
        self.invariant = invariant
        super().__init__(f"[{stage}] {invariant}")


@dataclass
class _Report:
    """Mutable accumulator behind the report.json artifact."""

    pipeline: str
    seed: int
    out: Path
    checks: List[dict]
    artifacts: List[str]
    extras: Dict[str, object]

    def check(self, stage: str, name: str, passed: bool, value=None) -> None:
        entry = {"stage": stage, "check": name, "passed": bool(passed)}
        if value is not None:
            entry["value"] = value
        self.checks.append(entry)
        if not passed:
            self.write()
            raise PipelineError(stage, name)

    def note(self, key: str, value) -> None:
        self.extras[key] = value

    def artifact(self, name: str) -> Path:
        if name not in self.artifacts:
            self.artifacts.append(name)
        return self.out / name

    def as_dict(self) -> dict:
        body = {
            "pipeline": self.pipeline,
            "seed": self.seed,
            "checks": self.checks,
            "artifacts": sorted(self.artifacts),
        }
        body.update(self.extras)
        return body

    def write(self) -> None:
        path = self.out / "report.json"
        if "report.json" not in self.artifacts:
            self.artifacts.append("report.json")
        text = json.dumps(self.as_dict(), indent=2, sort_keys=True)
        path.write_text(text + "\n", encoding="utf-8", newline="\n")


def _blocks_touched(lo: float, hi: float, m: int) -> range:
    """Blocks [c/m, (c+1)/m] whose closed interval meets closed [lo, hi]."""
    c_lo = max(0, math.ceil(lo * m) - 1)
    c_hi = min(m - 1, math.floor(hi * m))
    return range(c_lo, c_hi + 1)


def support_chain_sets(
    first: TimedCurve, second: TimedCurve, resolution: int
) -> Tuple[Set[Tuple[int, int]], Set[Tuple[int, int]], Set[Tuple[int, int]]]:
    """Three nested cell sets at a given resolution.

    Returns ``(support, graph_blocks, compatible_blocks)`` where

    * ``support`` holds the blocks carrying positive permuton mass,
    * ``graph_blocks`` holds every block whose closed square meets the
      closed graph of the time change t -> psi(t), and
    * ``compatible_blocks`` holds every block (r, c) such that some grid
      cell is visited by the first curve during the r-th time block and by
      the second curve during the c-th time block.

    The containment ``support <= graph_blocks <= compatible_blocks`` is a
    structural fact; callers turn it into a check.
    """
    if first.measure is not second.measure and not np.array_equal(
        first.measure.mass, second.measure.mass
    ):
        raise ValueError("timed curves must share a measure")
    m = int(resolution)
    permuton = permuton_from_pair(first, second, m)
    support = set(support_of(permuton).cells)

    graph_blocks: Set[Tuple[int, int]] = set()
    compatible: Set[Tuple[int, int]] = set()
    b1, b2 = first.breaks, second.breaks
    for cell in first.curve.cells:
        r1 = first.curve.rank_of(*cell)
        r2 = second.curve.rank_of(*cell)
        u, w = b1[r1], b1[r1 + 1] - b1[r1]
        v = b2[r2]
        if w <= 0.0:
            continue
        # Unit-slope segment {(u + p, v + p) : p in [0, w]}.
        for r in _blocks_touched(u, u + w, m):
            p_lo = max(0.0, r / m - u)
            p_hi = min(w, (r + 1) / m - u)
            if p_hi < p_lo:
                continue
            for c in _blocks_touched(v + p_lo, v + p_hi, m):
                graph_blocks.add((r, c))
        rows = _blocks_touched(u, u + w, m)
        cols = _blocks_touched(v, v + w, m)
        for r in rows:
            for c in cols:
                compatible.add((r, c))
    return support, graph_blocks, compatible


def cascade_recovery_error(measure, field: np.ndarray, gamma: float = 1.0,
                           eps: float | None = None) -> float:
    """Max centered error between recovered and planted block log-weights.

    ``field`` must be the log-mass field of ``measure`` computed with the
    same ``gamma`` and ``eps``. Before comparing, the same field computed
    for the uniform measure is subtracted; that flat-field step removes
    the deterministic profile caused by balls being clipped at the grid
    edge and uses no knowledge of the planted weights. The comparison
    then runs at the scale the ball actually probes, blocks one ball
    diameter across: field values are averaged per block and matched,
    after centering both sides, against the cumulative planted
    log-weights down to that block size.
    """
    if measure.kind != "cascade":
        raise ValueError("recovery comparison needs a cascade measure")
    if measure.depth < 3:
        raise ValueError("cascade recovery comparison needs depth >= 3")
    baseline = log_mass_field(build_measure("lebesgue", measure.depth),
                              gamma=gamma, eps=eps)
    level_hi = measure.depth - 2
    side_b = 2**level_hi
    k = measure.side // side_b
    planted = np.zeros((side_b, side_b))
    for level, w in enumerate(measure.meta["log_weights"], start=1):
        if level > level_hi:
            break
        w = np.asarray(w, dtype=float)
        reps = side_b // (2**level)
        planted += np.repeat(np.repeat(w, reps, axis=0), reps, axis=1)
    f = np.asarray(field, dtype=float) - baseline
    blocks = f.reshape(side_b, k, side_b, k).mean(axis=(1, 3))
    planted = planted - planted.mean()
    blocks = blocks - blocks.mean()
    return float(np.max(np.abs(blocks - planted)))


def normalized_cell_centers(curve: CellCurve) -> np.ndarray:
    """Cell centers in curve order, centered and scaled into the unit disk.

    The centroid moves to the origin and the outermost center lands on the
    unit circle, matching the disk normalization of a Tutte embedding.
    """
    side = curve.side
    pts = np.array(
        [complex((i + 0.5) / side, (j + 0.5) / side) for i, j in curve.cells]
    )
    pts = pts - pts.mean()
    extent = np.max(np.abs(pts))
    if extent > 0:
        pts = pts / extent
    return pts


def embedding_distortion(embedding: TutteEmbedding, curve: CellCurve) -> float:
    """Best-rotation RMS distance from normalized cell centers."""
    centers = normalized_cell_centers(curve)
    _, _, rms = align_embeddings(centers, embedding.positions)
    return float(rms)


def mc_harmonic_parallel(
    graph: CellGraph,
    x: int,
    boundary_cycle: Sequence[int],
    walks: int,
    seed: int,
    threads: int = 1,
) -> np.ndarray:
    """Monte Carlo harmonic prefix merged over independent seeded streams.

    Each stream gets a deterministic stage seed, so the merged prefix
    vector depends only on (seed, walks, threads) and not on scheduling.
    """
    threads = max(1, int(threads))
    if threads == 1:
        return mc_harmonic_oracle(graph, x, boundary_cycle, walks, stage_rng(seed, "mc-0"))
    base = walks // threads
    counts = [base + (1 if k < walks % threads else 0) for k in range(threads)]
    merged: Optional[np.ndarray] = None
    for k, w in enumerate(counts):
        if w == 0:
            continue
        part = mc_harmonic_oracle(graph, x, boundary_cycle, w, stage_rng(seed, f"mc-{k}"))
        piece = part * (w / walks)
        merged = piece if merged is None else merged + piece
    assert merged is not None
    merged[-1] = 1.0
    return merged


def _resolution(config: RunConfig) -> int:
    if config.resolution is not None:
        return int(config.resolution)
    return 4**config.depth


def _build_inputs(config: RunConfig, report: _Report):
    rng = stage_rng(config.seed, "measure")
    measure = build_measure(
        config.measure,
        config.depth,
        rng,
        sigma=config.sigma,
        gamma=config.gamma,
    )
    c1 = build_curve(config.curve, config.depth)
    c2 = build_curve(config.curve2, config.depth)
    if config.symmetry != "identity":
        c1 = apply_symmetry(c1, config.symmetry)
    if config.symmetry2 != "identity":
        c2 = apply_symmetry(c2, config.symmetry2)
    tc1 = mass_parametrize(c1, measure)
    tc2 = mass_parametrize(c2, measure)

    pio.write_measure(measure, report.artifact("measure.csv"))
    pio.write_curve(tc1, report.artifact("curve1.csv"))
    pio.write_curve(tc2, report.artifact("curve2.csv"))
    measure_figure(measure, report.artifact("measure.png"))
    curve_figure(c1, report.artifact("curve1.png"))
    curve_figure(c2, report.artifact("curve2.png"))
    report.check(
        "inputs",
        "curves share the measure grid",
        c1.depth == measure.depth and c2.depth == measure.depth,
        {"depth": config.depth},
    )
    return measure, c1, c2, tc1, tc2


def _permuton_stage(config: RunConfig, report: _Report, tc1, tc2):
    m = _resolution(config)
    permuton = permuton_from_pair(tc1, tc2, m)
    support = support_of(permuton)
    pio.write_permuton(permuton, report.artifact("permuton.csv"))
    pio.write_support(support, report.artifact("support.csv"))

    row_sums = permuton.mass.sum(axis=1) * m
    col_sums = permuton.mass.sum(axis=0) * m
    report.check(
        "permuton",
        "uniform marginals",
        bool(
            np.max(np.abs(row_sums - 1.0)) < 1e-9
            and np.max(np.abs(col_sums - 1.0)) < 1e-9
        ),
        {"resolution": m},
    )
    sup, graph_blocks, compatible = support_chain_sets(tc1, tc2, m)
    report.check(
        "permuton",
        "support inside the graph of the time change",
        sup <= graph_blocks,
        {"support": len(sup), "graph_blocks": len(graph_blocks)},
    )
    report.check(
        "permuton",
        "graph of the time change inside the compatible blocks",
        graph_blocks <= compatible,
        {"compatible_blocks": len(compatible)},
    )
    report.note("support_is_diagonal", sup == {(k, k) for k in range(m)})
    return permuton, support


def _augment_stage(report: _Report, support: SupportSet):
    augmented = augment_support(support)
    pio.write_support(augmented, report.artifact("augmented.csv"))
    again = augment_support(SupportSet(augmented.resolution, augmented.cells))
    report.check(
        "augment",
        "augmentation is idempotent",
        set(again.cells) == set(augmented.cells),
        {"cells": len(augmented.cells)},
    )
    tm1 = tm_from_augmented(augmented)
    pio.write_intersections(tm1, report.artifact("tm_step1.csv"))

    by_col: Dict[int, List[int]] = {}
    for r, c in support.cells:
        by_col.setdefault(c, []).append(r)
    shared = set()
    for rows in by_col.values():
        rows = sorted(rows)
        for a in range(len(rows)):
            for b in range(a + 1, len(rows)):
                shared.add((rows[a] + 1, rows[b] + 1))
    report.check(
        "augment",
        "derived relation covers ranks sharing a support column",
        all(tm1.has(i, j) for i, j in shared),
        {"shared_column_pairs": len(shared)},
    )
    return augmented, tm1


def _graph_stage(config: RunConfig, report: _Report, c1: CellCurve):
    fine = build_curve(config.curve, config.depth + 2)
    if config.symmetry != "identity":
        fine = apply_symmetry(fine, config.symmetry)
    tm_fine = tm_oracle_from_curve(fine)
    n_coarse = 4**config.depth
    rebuilt = graph_from_tm(tm_fine, n_coarse)
    expected = side_sharing_graph(c1)
    pio.write_graph(rebuilt, report.artifact("graph.json"))
    report.check(
        "graph",
        "contact relation rebuilds the side-sharing graph",
        rebuilt == expected,
        {"vertices": rebuilt.n, "edges": len(rebuilt.edges)},
    )
    return rebuilt


def _ring_walk(graph: CellGraph, border) -> Tuple[int, ...]:
    """Closed walk around the outer ring, traced from contact data alone.

    The ring is the cycle the contact graph induces on the border ranks.
    The walk starts at the smallest border rank and first steps to the
    smaller of its two ring neighbours. Nothing here looks at cell
    coordinates: mirroring the underlying geometry reverses the ring's
    geometric orientation but leaves ranks and contacts alone, so the
    walk comes out identical. Left versus right is exactly the
    information this chain cannot see.
    """
    bset = set(border)
    nbrs = {b: sorted(q for q in graph.neighbors(b) if q in bset) for b in bset}
    bad = sorted(b for b, ns in nbrs.items() if len(ns) != 2)
    if bad:
        raise ValueError(f"border ranks do not form a simple cycle at {bad[:3]}")
    start = min(bset)
    walk = [start, nbrs[start][0]]
    while True:
        prev, cur = walk[-2], walk[-1]
        a, b = nbrs[cur]
        nxt = b if a == prev else a
        if nxt == start:
            break
        walk.append(nxt)
    if len(walk) != len(bset):
        raise ValueError("border contacts split into more than one cycle")
    return tuple(walk + [start])


def _delta_interval(cuts, n: int) -> Tuple[int, int]:
    """Cut-time interval around the midpoint; the whole range if unpinched."""
    mid = (n + 1) // 2
    below = [t for t in cuts.ranks if t <= mid]
    u = below[-1] if below else 1
    above = [t for t in cuts.ranks if t > u]
    v = above[0] if above else n
    if v <= u:
        u, v = 1, n
    return u, v


def _boundary_stage(config: RunConfig, report: _Report, c1: CellCurve,
                    graph: CellGraph):
    tm = tm_oracle_from_curve(c1)
    framed = tm_add_outer_frame(tm, c1)
    cuts = cut_times(tm)
    pio.write_timeset(cuts, report.artifact("cuts.csv"))

    n = len(c1.cells)
    u, v = _delta_interval(cuts, n)
    ring = (u, v) == (1, n)
    if ring:
        # The boundary cycle of the whole square is the border ring,
        # whatever the curve; the two-arc split needs a proper pinch.
        border = boundary_times(framed, 1, n).ranks
        walk = _ring_walk(graph, border)
    else:
        try:
            walk = boundary_path(framed, u, v)
        except ValueError as exc:
            report.check("boundary", f"boundary walk construction: {exc}", False)
            raise  # not reached, the failed check raises first
    pio.write_rank_sequence(walk, report.artifact("pstar.csv"))
    report.check(
        "boundary",
        "boundary walk closes",
        len(walk) >= 2 and walk[0] == walk[-1],
        {"interval": [u, v], "walk_length": len(walk), "ring": ring},
    )
    return framed, walk, (u, v)


def _embed_stage(config: RunConfig, report: _Report, graph: CellGraph, walk):
    if config.depth < 2:
        report.check("embed", "grid has interior cells (depth >= 2)", False)
    n = graph.n
    bset = set(walk)
    target = marked_rank(n)
    interior_ranks = [r for r in range(1, n + 1) if r not in bset]
    if not interior_ranks:
        report.check("embed", "boundary walk leaves interior vertices", False)
    # The middle rank when it is interior, else the nearest interior rank.
    x = min(interior_ranks, key=lambda r: (abs(r - target), r))
    try:
        embedding = tutte_embedding(graph, walk, x=x, tol=config.tol)
    except ValueError as exc:
        report.check("embed", f"harmonic embedding solvable: {exc}", False)
        raise  # not reached, the failed check raises first
    pio.write_embedding(embedding, report.artifact("embedding.csv"))
    pio.write_diagnostics(
        report.artifact("diagnostics.json"),
        residual=embedding.residual,
        solver_iters=int(embedding.meta.get("solver_iters", 0)),
        walks=0,
        seed=config.seed,
    )
    embedding_figure(embedding, report.artifact("embedding.png"))
    report.check(
        "embed",
        "mean-value residual under tolerance",
        embedding.residual <= config.tol,
        {"residual": embedding.residual, "marked": x},
    )
    interior = [v for v in range(1, n + 1) if v not in set(embedding.boundary_cycle)]
    max_interior = max((abs(embedding.positions[v - 1]) for v in interior), default=0.0)
    report.check(
        "embed",
        "interior stays inside the unit circle",
        max_interior < 1.0,
        {"max_interior_modulus": max_interior},
    )
    return embedding


def _field_stage(config: RunConfig, report: _Report, measure):
    gamma = config.gamma if config.gamma is not None else 1.0
    field = log_mass_field(measure, gamma=gamma)
    pio.write_field(field, report.artifact("field.csv"))
    field_figure(field, report.artifact("field.png"))
    value = {"gamma": gamma}
    passed = bool(np.all(np.isfinite(field)))
    if measure.kind == "cascade" and measure.depth >= 3:
        err = cascade_recovery_error(measure, field, gamma=gamma)
        value["block_recovery_error"] = err
        report.note("field_recovery_error", err)
    report.check("field", "log-mass field is finite", passed, value)
    return field


def _run_permuton(config: RunConfig, report: _Report) -> None:
    measure, c1, c2, tc1, tc2 = _build_inputs(config, report)
    _permuton_stage(config, report, tc1, tc2)


def _run_embed(config: RunConfig, report: _Report) -> None:
    measure, c1, c2, tc1, tc2 = _build_inputs(config, report)
    graph = side_sharing_graph(c1)
    pio.write_graph(graph, report.artifact("graph.json"))
    framed, walk, _ = _boundary_stage(config, report, c1, graph)
    embedding = _embed_stage(config, report, graph, walk)
    report.note("distortion", embedding_distortion(embedding, c1))


def _run_recover(config: RunConfig, report: _Report) -> None:
    measure, c1, c2, tc1, tc2 = _build_inputs(config, report)
    permuton, support = _permuton_stage(config, report, tc1, tc2)
    _augment_stage(report, support)
    graph = _graph_stage(config, report, c1)
    framed, walk, _ = _boundary_stage(config, report, c1, graph)
    embedding = _embed_stage(config, report, graph, walk)
    report.note("distortion", embedding_distortion(embedding, c1))
    _field_stage(config, report, measure)


def _run_ensembles(config: RunConfig, report: _Report) -> None:
    kind = config.ensemble_kind
    n = config.ensemble_n
    if kind == "meandric":
        ensemble = enumerate_meanders(n)
    elif kind == "baxter":
        ensemble = enumerate_baxter(n)
    else:
        ensemble = enumerate_all(n)
    pio.write_ensemble(ensemble, report.artifact("ensemble.txt"))
    report.note("count", len(ensemble.members))
    report.check(
        "ensembles",
        "enumeration is nonempty and duplicate-free",
        len(set(ensemble.members)) == len(ensemble.members) > 0,
        {"kind": kind, "n": n},
    )
    if kind == "meandric":
        members = set(ensemble.members)
        closed = True
        for sigma in ensemble.members:
            for i in range(1, len(sigma) + 1):
                if reroot_permutation(sigma, i) not in members:
                    closed = False
        report.check(
            "ensembles",
            "meandric family closed under re-rooting",
            closed,
            {"members": len(members)},
        )


def _run_verify(config: RunConfig, report: _Report) -> None:
    # Walk mating: the interval characterization against the direct scan.
    rho = config.rho if config.rho is not None else 0.0
    for k, n in enumerate((40, 80)):
        pair = sample_walk_pair(n, rho, stage_rng(config.seed, f"verify-walk-{k}"))
        fast = mated_crt_graph(pair)
        slow = mated_crt_graph_bruteforce(pair)
        report.check(
            "verify",
            f"mated graph matches direct scan at n={n}",
            fast == slow,
            {"edges": len(fast.edges)},
        )

    # Harmonic measure on a path: splits proportionally to distance.
    path_edges = [(1, 2), (2, 3), (3, 4)]
    path = CellGraph(4, path_edges)
    prefix = harmonic_measure(path, 2, [1, 4, 1])
    expect = np.array([2.0 / 3.0, 1.0])
    report.check(
        "verify",
        "harmonic measure on a path matches the closed form",
        bool(np.max(np.abs(prefix - expect)) < 1e-10),
        {"prefix": [float(p) for p in prefix]},
    )

    # Monte Carlo agreement on a 3x3 grid, merged across streams.
    cells = [(i, j) for i in range(3) for j in range(3)]
    index = {c: k + 1 for k, c in enumerate(cells)}
    edges = []
    for (i, j), a in index.items():
        for di, dj in ((1, 0), (0, 1)):
            other = (i + di, j + dj)
            if other in index:
                edges.append((a, index[other]))
    grid = CellGraph(9, edges)
    center = index[(1, 1)]
    ring = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)]
    cycle = [index[c] for c in ring] + [index[ring[0]]]
    exact = harmonic_measure(grid, center, cycle)
    walks = max(1, config.mc_walks)
    mc = mc_harmonic_parallel(grid, center, cycle, walks, config.seed, config.threads)
    inc_exact = np.diff(np.concatenate(([0.0], exact)))
    inc_mc = np.diff(np.concatenate(([0.0], mc)))
    sigma3 = 3.0 * np.sqrt(np.maximum(inc_exact * (1 - inc_exact), 1e-12) / walks)
    report.check(
        "verify",
        "Monte Carlo harmonic increments within three sigma",
        bool(np.all(np.abs(inc_mc - inc_exact) <= sigma3)),
        {"walks": walks, "max_abs_err": float(np.max(np.abs(inc_mc - inc_exact)))},
    )

    # Contact relation rebuilds the side-sharing graph on a small grid.
    coarse = build_curve("hilbert", 2)
    fine = build_curve("hilbert", 4)
    rebuilt = graph_from_tm(tm_oracle_from_curve(fine), 16)
    report.check(
        "verify",
        "contact relation rebuilds side sharing at depth 2",
        rebuilt == side_sharing_graph(coarse),
        {"edges": len(rebuilt.edges)},
    )

    # Enumeration sizes for the loop and product families.
    meander_counts = {1: 1, 2: 2, 3: 8}
    for n, want in meander_counts.items():
        got = len(enumerate_meanders(n).members)
        report.check(
            "verify",
            f"meandric count at n={n}",
            got == want,
            {"count": got},
        )
    baxter_counts = {2: 2, 3: 6, 4: 22}
    for n, want in baxter_counts.items():
        got = len(enumerate_baxter(n).members)
        report.check(
            "verify",
            f"product-family count at n={n}",
            got == want,
            {"count": got},
        )

    # Re-rooting closure of the meandric family at desk scale.
    n_m = min(max(1, config.ensemble_n), 5)
    ensemble = enumerate_meanders(n_m)
    members = sorted(ensemble.members)
    closed = True
    for i in range(1, 2 * n_m + 1):
        rerooted = sorted(reroot_permutation(s, i) for s in ensemble.members)
        if rerooted != members:
            closed = False
    report.check(
        "verify",
        f"meandric family closed under re-rooting at n={n_m}",
        closed,
        {"members": len(members)},
    )

    # Byte determinism of the serialization layer.
    probe = build_measure("cascade", 2, stage_rng(config.seed, "verify-measure"))
    p1 = report.out / "determinism_probe_a.csv"
    p2 = report.out / "determinism_probe_b.csv"
    pio.write_measure(probe, p1)
    pio.write_measure(probe, p2)
    same = p1.read_bytes() == p2.read_bytes()
    p1.unlink()
    p2.unlink()
    report.check("verify", "serialization is byte-deterministic", same)


def _stage_measure(config: RunConfig, report: _Report) -> None:
    measure = build_measure(
        config.measure,
        config.depth,
        stage_rng(config.seed, "measure"),
        sigma=config.sigma,
        gamma=config.gamma,
    )
    pio.write_measure(measure, report.artifact("measure.csv"))
    measure_figure(measure, report.artifact("measure.png"))
    report.check(
        "measure",
        "total mass is one",
        bool(abs(measure.mass.sum() - 1.0) < 1e-9),
        {"kind": measure.kind, "depth": measure.depth},
    )


def _stage_curves(config: RunConfig, report: _Report) -> None:
    _build_inputs(config, report)


def _stage_walks(config: RunConfig, report: _Report) -> None:
    if config.rho is not None:
        rho = config.rho
    elif config.gamma is not None:
        rho = coupling_rho(config.gamma**2)
    else:
        rho = 0.0
    pair = sample_walk_pair(config.n, rho, stage_rng(config.seed, "walks"))
    pio.write_walks(pair, report.artifact("walks.csv"))
    graph = mated_crt_graph(pair)
    pio.write_graph(graph, report.artifact("graph.json"))
    value = {"n": config.n, "rho": rho, "edges": len(graph.edges)}
    if config.n <= 300:
        report.check(
            "walks",
            "interval characterization matches the direct scan",
            graph == mated_crt_graph_bruteforce(pair),
            value,
        )
    else:
        report.check("walks", "mated graph built", True, value)


def _stage_augment(config: RunConfig, report: _Report) -> None:
    _, _, _, tc1, tc2 = _build_inputs(config, report)
    _, support = _permuton_stage(config, report, tc1, tc2)
    _augment_stage(report, support)


def _stage_tm(config: RunConfig, report: _Report) -> None:
    _, c1, _, tc1, tc2 = _build_inputs(config, report)
    _, support = _permuton_stage(config, report, tc1, tc2)
    _augment_stage(report, support)
    contact = tm_oracle_from_curve(c1)
    pio.write_intersections(contact, report.artifact("tm_contact.csv"))
    report.check(
        "tm",
        "contact relation is reflexive and symmetric by construction",
        all(contact.has(k, k) for k in range(1, len(c1.cells) + 1)),
        {"pairs": len(contact.pairs)},
    )


def _stage_graph(config: RunConfig, report: _Report) -> None:
    _, c1, _, _, _ = _build_inputs(config, report)
    _graph_stage(config, report, c1)


def _stage_geometry(config: RunConfig, report: _Report) -> None:
    _, c1, _, _, _ = _build_inputs(config, report)
    tm = tm_oracle_from_curve(c1)
    framed = tm_add_outer_frame(tm, c1)
    cuts = cut_times(tm)
    pio.write_timeset(cuts, report.artifact("cuts.csv"))

    n = len(c1.cells)
    u, v = _delta_interval(cuts, n)
    btimes = boundary_times(framed, u, v)
    pio.write_timeset(btimes, report.artifact("boundary.csv"))
    if (u, v) == (1, n):
        border = boundary_times(framed, 1, n).ranks
        walk = _ring_walk(side_sharing_graph(c1), border)
        pio.write_rank_sequence(walk, report.artifact("pstar.csv"))
        report.check(
            "geometry",
            "whole square: border ring is the boundary walk",
            walk[0] == walk[-1] and set(walk) == set(btimes.ranks),
            {"interval": [u, v], "walk_length": len(walk)},
        )
        return
    try:
        first, second = boundary_bipartition(framed, u, v)
        walk = boundary_path(framed, u, v)
    except ValueError as exc:
        report.check("geometry", f"boundary arc construction: {exc}", False)
        raise  # not reached, the failed check raises first
    pio.write_rank_sequence(sorted(first), report.artifact("part1.csv"))
    pio.write_rank_sequence(sorted(second), report.artifact("part2.csv"))
    pio.write_rank_sequence(walk, report.artifact("pstar.csv"))
    report.check(
        "geometry",
        "two boundary arcs joined into a closed walk",
        walk[0] == walk[-1] and set(walk) <= (set(first) | set(second)),
        {"interval": [u, v], "walk_length": len(walk)},
    )


_STAGES = {
    "measure": _stage_measure,
    "curves": _stage_curves,
    "walks": _stage_walks,
    "augment": _stage_augment,
    "tm": _stage_tm,
    "graph": _stage_graph,
    "geometry": _stage_geometry,
}


def run_stage(config: RunConfig, stage: str) -> dict:
    """Run a single named stage (one CLI subcommand) and return its report."""
    if stage not in _STAGES:
        raise ValueError(f"unknown stage {stage!r}; expected one of {sorted(_STAGES)}")
    out = config.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    report = _Report(
        pipeline=stage,
        seed=config.seed,
        out=out,
        checks=[],
        artifacts=[],
        extras={},
    )
    _STAGES[stage](config, report)
    report.write()
    return report.as_dict()


_RUNNERS = {
    "permuton": _run_permuton,
    "embed": _run_embed,
    "recover": _run_recover,
    "reconstruct": _run_recover,
    "ensembles": _run_ensembles,
    "verify": _run_verify,
}


def run_pipeline(config: RunConfig) -> dict:
    """Run the configured pipeline and return the report dictionary.

    Artifacts land in ``config.out_dir()``.  Raises :class:`PipelineError`
    on the first violated invariant, after the report has been written.
    """
    out = config.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    report = _Report(
        pipeline=config.pipeline,
        seed=config.seed,
        out=out,
        checks=[],
        artifacts=[],
        extras={},
    )
    runner = _RUNNERS[config.pipeline]
    runner(config, report)
    report.write()
    return report.as_dict()
