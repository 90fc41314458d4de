"""Readers and writers for the delimited artifact formats.

Every writer produces canonical bytes: rows in a fixed sort order,
floats rendered with ``repr`` (shortest decimal that round-trips), LF
line endings, no trailing whitespace. Re-running a pipeline with the
same inputs must reproduce each file byte for byte, and the test suite
holds the CLI to that, so nothing here may depend on dict order,
locale, or platform line conventions.

Formats:

* measure: ``depth,kind,gamma`` header line, its values, then
  ``cell_i,cell_j,mass`` rows in row-major cell order.
* scalar field: ``i,j,value`` rows.
* curve: ``rank,cell_i,cell_j`` rows, plus a ``t`` column when timed.
* walks: ``k,L,R`` rows from k = 0.
* graph: JSON ``{"edges": [[x, y], ...], "n": n}`` with x < y,
  lexicographically sorted edges, sorted keys.
* permuton: ``resolution,m`` line, then ``row,col,mass`` rows for
  nonzero cells; support files the same minus the mass column.
* intersection set: ``i,j`` rows, i <= j, sorted.
* time set: ``rank`` rows, sorted.
* embedding: ``vertex,x,y`` rows by vertex.
* ensemble: one permutation per line, space-separated 1-based values.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .curves import CellCurve, TimedCurve
from .embedding import TutteEmbedding
from .ensembles import PermutationEnsemble
from .graphs import CellGraph
from .intersections import IntersectionSet, TimeSet
from .measures import GridMeasure
from .permutons import Permuton, SupportSet
from .walks import WalkPair

__all__ = [
    "write_measure", "read_measure",
    "write_field", "read_field",
    "write_curve", "read_curve",
    "write_walks", "read_walks",
    "write_graph", "read_graph",
    "write_permuton", "read_permuton",
    "write_support", "read_support",
    "write_intersections", "read_intersections",
    "write_timeset", "read_timeset",
    "write_embedding", "read_embedding",
    "write_diagnostics",
    "write_ensemble", "read_ensemble",
]


def _dump(path, lines: Sequence[str]) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _rows(path) -> List[List[str]]:
    text = Path(path).read_text(encoding="utf-8")
    return [line.split(",") for line in text.splitlines() if line]


# -- measures ---------------------------------------------------------------


def write_measure(measure: GridMeasure, path) -> None:
    lines = ["depth,kind,gamma"]
    g = repr(float(measure.gamma)) if measure.gamma is not None else ""
    lines.append(f"{measure.depth},{measure.kind},{g}")
    lines.append("cell_i,cell_j,mass")
    side = measure.side
    for i in range(side):
        for j in range(side):
            lines.append(f"{i},{j},{float(measure.mass[i, j])!r}")
    _dump(path, lines)


def read_measure(path) -> GridMeasure:
    rows = _rows(path)
    if rows[0] != ["depth", "kind", "gamma"]:
        raise ValueError(f"{path}: not a measure file")
    depth = int(rows[1][0])
    kind = rows[1][1]
    gamma = float(rows[1][2]) if rows[1][2] else None
    side = 2**depth
    mass = np.empty((side, side))
    for i, j, value in rows[3:]:
        mass[int(i), int(j)] = float(value)
    return GridMeasure(depth=depth, mass=mass, kind=kind, gamma=gamma)


def write_field(field: np.ndarray, path) -> None:
    lines = ["i,j,value"]
    side = field.shape[0]
    for i in range(side):
        for j in range(side):
            lines.append(f"{i},{j},{float(field[i, j])!r}")
    _dump(path, lines)


def read_field(path) -> np.ndarray:
    rows = _rows(path)
    if rows[0] != ["i", "j", "value"]:
        raise ValueError(f"{path}: not a field file")
    entries = [(int(i), int(j), float(v)) for i, j, v in rows[1:]]
    side = max(i for i, _, _ in entries) + 1
    out = np.empty((side, side))
    for i, j, v in entries:
        out[i, j] = v
    return out


# -- curves -----------------------------------------------------------------


def write_curve(curve: Union[CellCurve, TimedCurve], path) -> None:
    if isinstance(curve, TimedCurve):
        lines = ["rank,cell_i,cell_j,t"]
        for r, (i, j) in enumerate(curve.curve.cells):
            lines.append(f"{r + 1},{i},{j},{float(curve.breaks[r])!r}")
    else:
        lines = ["rank,cell_i,cell_j"]
        for r, (i, j) in enumerate(curve.cells):
            lines.append(f"{r + 1},{i},{j}")
    _dump(path, lines)


def read_curve(path) -> Tuple[CellCurve, Optional[np.ndarray]]:
    """Load a curve file. Returns the curve and its time column, if any.

    The time column, when present, holds visit start times; the final
    breakpoint 1.0 is appended to make a full breakpoint vector. Kind
    and closure are not stored in the format, so the curve comes back
    with kind ``loaded`` and the open-curve validation.
    """
    rows = _rows(path)
    timed = rows[0] == ["rank", "cell_i", "cell_j", "t"]
    if not timed and rows[0] != ["rank", "cell_i", "cell_j"]:
        raise ValueError(f"{path}: not a curve file")
    cells = []
    times = []
    for row in rows[1:]:
        cells.append((int(row[1]), int(row[2])))
        if timed:
            times.append(float(row[3]))
    n = len(cells)
    depth = n.bit_length() // 2
    if 4**depth != n:
        raise ValueError(f"{path}: {n} cells is not a full dyadic grid")
    curve = CellCurve(depth=depth, cells=tuple(cells), kind="loaded")
    if timed:
        return curve, np.array(times + [1.0])
    return curve, None


# -- walks ------------------------------------------------------------------


def write_walks(walks: WalkPair, path) -> None:
    lines = ["k,L,R"]
    for k in range(len(walks.L)):
        lines.append(f"{k},{float(walks.L[k])!r},{float(walks.R[k])!r}")
    _dump(path, lines)


def read_walks(path) -> WalkPair:
    rows = _rows(path)
    if rows[0] != ["k", "L", "R"]:
        raise ValueError(f"{path}: not a walks file")
    L = np.array([float(r[1]) for r in rows[1:]])
    R = np.array([float(r[2]) for r in rows[1:]])
    return WalkPair(L=L, R=R)


# -- graphs -----------------------------------------------------------------


def write_graph(graph: CellGraph, path) -> None:
    payload = {"n": graph.n, "edges": [list(e) for e in graph.edge_list()]}
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n",
                          encoding="utf-8", newline="\n")


def read_graph(path) -> CellGraph:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    edges = frozenset((int(a), int(b)) for a, b in payload["edges"])
    return CellGraph(n=int(payload["n"]), edges=edges)


# -- permutons --------------------------------------------------------------


def write_permuton(permuton: Permuton, path) -> None:
    lines = [f"resolution,{permuton.resolution}", "row,col,mass"]
    rows, cols = np.nonzero(permuton.mass)
    for r, c in sorted(zip(rows.tolist(), cols.tolist())):
        lines.append(f"{r},{c},{float(permuton.mass[r, c])!r}")
    _dump(path, lines)


def read_permuton(path, marginal_check: bool = True) -> Permuton:
    rows = _rows(path)
    if rows[0][0] != "resolution":
        raise ValueError(f"{path}: not a permuton file")
    m = int(rows[0][1])
    mass = np.zeros((m, m))
    for r, c, v in rows[2:]:
        mass[int(r), int(c)] = float(v)
    return Permuton(resolution=m, mass=mass, marginal_check=marginal_check)


def write_support(support: SupportSet, path) -> None:
    lines = [f"resolution,{support.resolution}", "row,col"]
    for r, c in sorted(support.cells):
        lines.append(f"{r},{c}")
    _dump(path, lines)


def read_support(path) -> SupportSet:
    rows = _rows(path)
    if rows[0][0] != "resolution":
        raise ValueError(f"{path}: not a support file")
    m = int(rows[0][1])
    cells = frozenset((int(r), int(c)) for r, c in rows[2:])
    return SupportSet(resolution=m, cells=cells)


# -- intersection sets and time sets ----------------------------------------


def write_intersections(tm: IntersectionSet, path) -> None:
    lines = ["i,j"]
    for p, q in tm.pair_list():
        lines.append(f"{p},{q}")
    _dump(path, lines)


def read_intersections(path) -> IntersectionSet:
    rows = _rows(path)
    if rows[0] != ["i", "j"]:
        raise ValueError(f"{path}: not an intersection file")
    pairs = frozenset((int(p), int(q)) for p, q in rows[1:])
    n = max(q for _, q in pairs)
    return IntersectionSet(n=n, pairs=pairs)


def write_timeset(times: TimeSet, path) -> None:
    _dump(path, ["rank"] + [str(r) for r in times.ranks])


def write_rank_sequence(ranks: Sequence[int], path) -> None:
    """Ranks in traversal order (boundary walks), same layout as a time set."""
    _dump(path, ["rank"] + [str(r) for r in ranks])


def read_timeset(path, n: Optional[int] = None) -> TimeSet:
    rows = _rows(path)
    if rows[0] != ["rank"]:
        raise ValueError(f"{path}: not a time-set file")
    ranks = tuple(int(r[0]) for r in rows[1:])
    return TimeSet(n=n if n is not None else (max(ranks) if ranks else 1), ranks=ranks)


# -- embeddings -------------------------------------------------------------


def write_embedding(embedding: Union[TutteEmbedding, np.ndarray], path) -> None:
    pos = embedding.positions if isinstance(embedding, TutteEmbedding) else embedding
    lines = ["vertex,x,y"]
    for v, z in enumerate(np.asarray(pos, dtype=complex), start=1):
        lines.append(f"{v},{float(z.real)!r},{float(z.imag)!r}")
    _dump(path, lines)


def read_embedding(path) -> np.ndarray:
    rows = _rows(path)
    if rows[0] != ["vertex", "x", "y"]:
        raise ValueError(f"{path}: not an embedding file")
    out = np.zeros(len(rows) - 1, dtype=complex)
    for v, x, y in rows[1:]:
        out[int(v) - 1] = float(x) + 1j * float(y)
    return out


def write_diagnostics(path, *, residual: float, solver_iters: int,
                      walks: int, seed: int) -> None:
    payload = {"residual": float(residual), "solver_iters": int(solver_iters),
               "walks": int(walks), "seed": int(seed)}
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n",
                          encoding="utf-8", newline="\n")


# -- ensembles --------------------------------------------------------------


def write_ensemble(ensemble: PermutationEnsemble, path) -> None:
    lines = [" ".join(str(v) for v in sigma) for sigma in ensemble.members]
    _dump(path, lines)


def read_ensemble(path, kind: str = "all") -> PermutationEnsemble:
    text = Path(path).read_text(encoding="utf-8")
    members = tuple(tuple(int(v) for v in line.split())
                    for line in text.splitlines() if line.strip())
    if not members:
        raise ValueError(f"{path}: empty ensemble file")
    return PermutationEnsemble(n=len(members[0]), members=members, kind=kind)
