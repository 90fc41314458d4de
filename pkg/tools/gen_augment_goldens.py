"""Freeze golden answers for the support-saturation pipeline step.

The goldens are produced by a deliberately naive oracle: rectangle
completion to a fixpoint (whenever three corners of an axis-aligned
rectangle are present, add the fourth), then rank pairs from shared
columns of the completed set. The library implements the same
semantics through connected components of the row-column incidence
graph; the tests compare it against these frozen answers cell by cell.

Instances come from two sources: planted product structures with
random within-block cover patterns, and supports of actual curve-pair
permutons rasterized at resolutions that do not divide the grid, which
is what makes rows share columns in practice.

Run from the repository root:

    python3 tools/gen_augment_goldens.py

Rewrites tests/data/augment_goldens.json in place.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from permurec import (  # noqa: E402  (path setup above)
    apply_symmetry,
    build_curve,
    build_measure,
    mass_parametrize,
    permuton_from_pair,
    stage_rng,
    support_of,
)

OUT_PATH = Path(__file__).resolve().parents[1] / "tests" / "data" / "augment_goldens.json"


def rectangle_closure(cells):
    """Fixpoint of rectangle completion. Independent of the library."""
    have = set(cells)
    changed = True
    while changed:
        changed = False
        by_row = {}
        by_col = {}
        for r, c in have:
            by_row.setdefault(r, set()).add(c)
            by_col.setdefault(c, set()).add(r)
        for r, c in list(have):
            for c2 in list(by_row[r]):
                for r2 in list(by_col[c]):
                    if (r2, c2) not in have:
                        have.add((r2, c2))
                        by_row.setdefault(r2, set()).add(c2)
                        by_col.setdefault(c2, set()).add(r2)
                        changed = True
    return sorted(have)


def tm_pairs_from_cells(cells):
    """1-based rank pairs: shared column of the completed set, plus diagonal."""
    by_col = {}
    rows = set()
    for r, c in cells:
        by_col.setdefault(c, set()).add(r)
        rows.add(r)
    pairs = {(r + 1, r + 1) for r in rows}
    for col_rows in by_col.values():
        ordered = sorted(col_rows)
        for a in range(len(ordered)):
            for b in range(a + 1, len(ordered)):
                pairs.add((ordered[a] + 1, ordered[b] + 1))
    return sorted(pairs)


def planted_instance(rng, m):
    """Random product structure with a covering sample of each block."""
    k = int(rng.integers(1, min(m, 4) + 1))

    def partition(size, groups):
        labels = np.concatenate([np.arange(groups),
                                 rng.integers(0, groups, size=size - groups)])
        rng.shuffle(labels)
        return labels

    row_labels = partition(m, k)
    col_labels = partition(m, k)
    cells = set()
    for g in range(k):
        rows = [r for r in range(m) if row_labels[r] == g]
        cols = [c for c in range(m) if col_labels[c] == g]
        for r in rows:
            cells.add((r, int(rng.choice(cols))))
        for c in cols:
            cells.add((int(rng.choice(rows)), c))
        for r in rows:
            for c in cols:
                if rng.random() < 0.3:
                    cells.add((r, c))
    return sorted(cells)


def curve_instance(measure_kind, depth, resolution, symmetry2, seed):
    measure = build_measure(measure_kind, depth, stage_rng(seed, "measure"),
                            sigma=0.6, gamma=1.2)
    c1 = build_curve("hilbert", depth)
    c2 = apply_symmetry(build_curve("hilbert", depth), symmetry2)
    tc1 = mass_parametrize(c1, measure)
    tc2 = mass_parametrize(c2, measure)
    permuton = permuton_from_pair(tc1, tc2, resolution)
    return sorted(support_of(permuton).cells)


def main():
    rng = np.random.default_rng(20240817)
    records = []

    for idx in range(30):
        m = int(rng.integers(4, 11))
        cells = planted_instance(rng, m)
        records.append({
            "name": f"planted-{idx:02d}",
            "resolution": m,
            "support": [list(c) for c in cells],
        })

    combo = 0
    for measure_kind in ("cascade", "exp-field"):
        for depth in (1, 2):
            for resolution in (3, 5, 6, 7):
                for symmetry2 in ("rot180", "mirror_main"):
                    if combo >= 24:
                        break
                    cells = curve_instance(measure_kind, depth, resolution,
                                           symmetry2, seed=100 + combo)
                    records.append({
                        "name": f"curve-{combo:02d}-{measure_kind}-d{depth}-m{resolution}",
                        "resolution": resolution,
                        "support": [list(c) for c in cells],
                    })
                    combo += 1

    for rec in records:
        cells = [tuple(c) for c in rec["support"]]
        closed = rectangle_closure(cells)
        rec["augmented"] = [list(c) for c in closed]
        rec["tm_pairs"] = [list(p) for p in tm_pairs_from_cells(closed)]

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(records, indent=1, sort_keys=True) + "\n",
                        encoding="utf-8", newline="\n")
    print(f"wrote {len(records)} instances to {OUT_PATH}")


if __name__ == "__main__":
    main()
