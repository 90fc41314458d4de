import numpy as np
import pytest

from permurec.curves import (
    SYMMETRIES,
    CellCurve,
    apply_symmetry,
    build_curve,
    conjugate,
    induced_permutation,
    mass_parametrize,
)
from permurec.measures import build_measure


def test_hilbert_depth1_quadrant_order():
    c = build_curve("hilbert", 1)
    assert c.cells == ((0, 0), (0, 1), (1, 1), (1, 0))
    assert not c.closed


@pytest.mark.parametrize("depth", [1, 2, 3, 4, 5])
def test_hilbert_endpoints(depth):
    c = build_curve("hilbert", depth)
    assert c.cells[0] == (0, 0)
    assert c.cells[-1] == (c.side - 1, 0)


def test_moore_is_closed_and_needs_depth_two():
    c = build_curve("moore", 2)
    assert c.closed
    a, b = c.cells[0], c.cells[-1]
    assert abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1
    with pytest.raises(ValueError):
        build_curve("moore", 1)


def test_build_curve_rejects_bad_input():
    with pytest.raises(ValueError):
        build_curve("peano", 2)
    with pytest.raises(ValueError):
        build_curve("hilbert", 0)
    with pytest.raises(ValueError):
        build_curve("hilbert", 13)


@pytest.mark.parametrize("kind,depths", [("hilbert", (1, 2, 3, 4)), ("moore", (2, 3, 4))])
def test_refinement_traverses_parent_blocks_in_order(kind, depths):
    """Rank 4r..4r+3 of the refined curve stays inside coarse cell r."""
    for depth in depths:
        coarse = build_curve(kind, depth)
        fine = build_curve(kind, depth + 1)
        for r, (ci, cj) in enumerate(coarse.cells):
            for k in range(4):
                fi, fj = fine.cells[4 * r + k]
                assert (fi // 2, fj // 2) == (ci, cj)


def test_rank_of_inverts_cells():
    c = build_curve("hilbert", 3)
    for r, cell in enumerate(c.cells):
        assert c.rank_of(*cell) == r


def test_all_eight_symmetries_produce_valid_curves():
    c = build_curve("hilbert", 2)
    seen = set()
    for name in SYMMETRIES:
        t = apply_symmetry(c, name)
        assert t.depth == c.depth
        seen.add(t.cells)
    # hilbert has no nontrivial self-symmetry at depth 2
    assert len(seen) == 8


def test_symmetry_group_relations():
    c = build_curve("hilbert", 2)
    r = c
    for _ in range(4):
        r = apply_symmetry(r, "rot90")
    assert r.cells == c.cells
    m = apply_symmetry(apply_symmetry(c, "mirror_v"), "mirror_v")
    assert m.cells == c.cells


def test_conjugate_is_the_horizontal_mirror_and_an_involution():
    c = build_curve("moore", 2)
    cc = conjugate(c)
    side = c.side
    assert cc.cells == tuple((i, side - 1 - j) for i, j in c.cells)
    assert conjugate(cc).cells == c.cells


def test_unknown_symmetry_rejected():
    with pytest.raises(ValueError):
        apply_symmetry(build_curve("hilbert", 1), "transpose")


def test_cell_curve_validation():
    with pytest.raises(ValueError):
        CellCurve(depth=1, cells=((0, 0), (0, 1), (1, 1)), kind="x")
    with pytest.raises(ValueError):
        CellCurve(depth=1, cells=((0, 0), (0, 1), (1, 1), (0, 0)), kind="x")
    with pytest.raises(ValueError):
        CellCurve(depth=1, cells=((0, 0), (1, 1), (0, 1), (1, 0)), kind="x")


def test_closed_flag_requires_adjacent_ends():
    ring = ((0, 0), (0, 1), (1, 1), (1, 0))
    assert CellCurve(depth=1, cells=ring, kind="x", closed=True).closed
    zigzag = build_curve("hilbert", 2).cells  # endpoints three cells apart
    with pytest.raises(ValueError):
        CellCurve(depth=2, cells=zigzag, kind="x", closed=True)


def test_mass_parametrize_breaks_accumulate_cell_masses():
    measure = build_measure("cascade", 2, 7)
    c = build_curve("hilbert", 2)
    tc = mass_parametrize(c, measure)
    assert tc.breaks[0] == 0.0
    assert tc.breaks[-1] == 1.0
    for r, cell in enumerate(c.cells):
        assert tc.weight(r) == pytest.approx(measure.mass[cell], abs=1e-12)
    assert np.all(np.diff(tc.breaks) > 0)


def test_timed_curve_lookups_agree():
    measure = build_measure("lebesgue", 2)
    tc = mass_parametrize(build_curve("hilbert", 2), measure)
    lo, hi = tc.interval_of_cell(0, 0)
    assert (lo, hi) == (0.0, pytest.approx(1 / 16))
    assert tc.cell_at_time(0.0) == (0, 0)
    assert tc.cell_at_time(1.0) == tc.curve.cells[-1]
    # break times belong to the later visit
    assert tc.cell_at_time(float(tc.breaks[1])) == tc.curve.cells[1]
    with pytest.raises(ValueError):
        tc.cell_at_time(1.5)


def test_mass_parametrize_depth_mismatch():
    with pytest.raises(ValueError):
        mass_parametrize(build_curve("hilbert", 2), build_measure("lebesgue", 3))


def test_induced_permutation_hilbert_vs_rot180():
    measure = build_measure("lebesgue", 1)
    first = mass_parametrize(build_curve("hilbert", 1), measure)
    second = mass_parametrize(apply_symmetry(build_curve("hilbert", 1), "rot180"),
                              measure)
    sigma, weights = induced_permutation(first, second)
    assert sigma == (3, 4, 1, 2)
    assert np.allclose(weights, 0.25)


def test_induced_permutation_identity_pair():
    measure = build_measure("cascade", 2, 3)
    tc = mass_parametrize(build_curve("hilbert", 2), measure)
    sigma, _ = induced_permutation(tc, tc)
    assert sigma == tuple(range(1, 17))


def test_induced_permutation_unchanged_by_conjugating_both():
    measure = build_measure("lebesgue", 2)
    c1 = build_curve("hilbert", 2)
    c2 = apply_symmetry(c1, "rot90")
    sigma, _ = induced_permutation(mass_parametrize(c1, measure),
                                   mass_parametrize(c2, measure))
    sigma_conj, _ = induced_permutation(
        mass_parametrize(conjugate(c1), measure),
        mass_parametrize(conjugate(c2), measure))
    assert sigma == sigma_conj


def test_induced_permutation_changes_when_one_side_is_conjugated():
    measure = build_measure("lebesgue", 2)
    c1 = build_curve("hilbert", 2)
    c2 = apply_symmetry(c1, "rot90")
    sigma, _ = induced_permutation(mass_parametrize(c1, measure),
                                   mass_parametrize(c2, measure))
    lopsided, _ = induced_permutation(mass_parametrize(c1, measure),
                                      mass_parametrize(conjugate(c2), measure))
    assert sigma != lopsided


def test_induced_permutation_requires_shared_measure():
    a = mass_parametrize(build_curve("hilbert", 2), build_measure("cascade", 2, 1))
    b = mass_parametrize(build_curve("hilbert", 2), build_measure("cascade", 2, 2))
    with pytest.raises(ValueError):
        induced_permutation(a, b)
