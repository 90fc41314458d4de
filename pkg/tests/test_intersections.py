"""Contact relations and the structure read back out of them.

Ground truth throughout is coordinate geometry: cells touch when their
closures meet, i.e. when their indices differ by at most one in each
axis. Everything the module under test recovers (coarse graphs, cut
ranks, boundary arcs) is checked against oracles that look at the
coordinates directly, which the recovery code never does.
"""

import pytest

from itertools import combinations

from permurec.curves import build_curve, conjugate
from permurec.graphs import side_sharing_graph
from permurec.intersections import (
    IntersectionSet,
    boundary_bipartition,
    boundary_path,
    boundary_times,
    cut_times,
    graph_from_tm,
    tm_add_outer_frame,
    tm_from_augmented,
    tm_oracle_from_curve,
)
from permurec.permutons import SupportSet, augment_support


def chebyshev_relation(curve):
    """Independent contact oracle: max-coordinate distance at most 1."""
    pairs = set()
    for (r, (i, j)), (s, (k, l)) in combinations(enumerate(curve.cells), 2):
        if max(abs(i - k), abs(j - l)) <= 1:
            pairs.add((r + 1, s + 1))
    pairs.update((r, r) for r in range(1, curve.n_cells + 1))
    return frozenset(pairs)


def border_ring_ranks(curve):
    """Ranks of the border cells, walked once around the grid edge."""
    side = curve.side
    ring = [(0, j) for j in range(side)]
    ring += [(i, side - 1) for i in range(1, side)]
    ring += [(side - 1, j) for j in range(side - 2, -1, -1)]
    ring += [(i, 0) for i in range(side - 2, 0, -1)]
    return [curve.rank_of(i, j) + 1 for (i, j) in ring]


def geometric_arcs(curve):
    """The two border arcs between the curve's first and last cell."""
    ranks = border_ring_ranks(curve)
    n = curve.n_cells
    i1, i2 = ranks.index(1), ranks.index(n)
    lo, hi = sorted((i1, i2))
    return frozenset(ranks[lo:hi + 1]), frozenset(ranks[hi:] + ranks[:lo + 1])


class TestIntersectionSet:
    def test_diagonal_added_and_pairs_sorted(self):
        tm = IntersectionSet(n=4, pairs=frozenset({(3, 1)}))
        assert (1, 3) in tm.pairs
        assert all(p <= q for p, q in tm.pairs)
        assert {(k, k) for k in range(1, 5)} <= tm.pairs

    def test_has_ignores_order(self):
        tm = IntersectionSet(n=5, pairs=frozenset({(2, 4)}))
        assert tm.has(2, 4) and tm.has(4, 2)
        assert not tm.has(2, 5)

    def test_pair_list_lexicographic(self):
        tm = IntersectionSet(n=3, pairs=frozenset({(1, 3), (1, 2)}))
        assert tm.pair_list() == ((1, 1), (1, 2), (1, 3), (2, 2), (3, 3))

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            IntersectionSet(n=0, pairs=frozenset())
        with pytest.raises(ValueError):
            IntersectionSet(n=3, pairs=frozenset({(1, 4)}))
        with pytest.raises(ValueError):
            IntersectionSet(n=3, pairs=frozenset({(0, 2)}))


class TestOracleFromCurve:
    def test_depth_one_relation_is_complete(self):
        # all four cells of a 2x2 grid touch each other
        tm = tm_oracle_from_curve(build_curve("hilbert", 1))
        assert tm.pairs == frozenset(
            (p, q) for p in range(1, 5) for q in range(p, 5))

    @pytest.mark.parametrize("kind,depth", [("hilbert", 2), ("moore", 2)])
    def test_consecutive_ranks_always_touch(self, kind, depth):
        curve = build_curve(kind, depth)
        tm = tm_oracle_from_curve(curve)
        assert all(tm.has(r, r + 1) for r in range(1, curve.n_cells))

    @pytest.mark.parametrize("kind,depths", [("hilbert", (1, 2, 3, 4)),
                                             ("moore", (2, 3))])
    def test_matches_coordinate_oracle(self, kind, depths):
        for depth in depths:
            curve = build_curve(kind, depth)
            tm = tm_oracle_from_curve(curve)
            assert tm.pairs == chebyshev_relation(curve), (kind, depth)


class TestOuterFrame:
    def test_frame_rank_pairs_with_exactly_the_border(self):
        curve = build_curve("hilbert", 2)
        tm = tm_oracle_from_curve(curve)
        framed = tm_add_outer_frame(tm, curve)
        n, frame = curve.n_cells, curve.n_cells + 1
        assert framed.n == frame
        border = set(border_ring_ranks(curve))
        touching = {p for p, q in framed.pairs if q == frame and p != frame}
        assert touching == border
        assert len(border) == 4 * curve.side - 4

    def test_original_pairs_survive(self):
        curve = build_curve("hilbert", 2)
        tm = tm_oracle_from_curve(curve)
        framed = tm_add_outer_frame(tm, curve)
        assert tm.pairs <= framed.pairs

    def test_interior_rank_not_framed(self):
        curve = build_curve("hilbert", 3)
        framed = tm_add_outer_frame(tm_oracle_from_curve(curve), curve)
        interior = curve.rank_of(3, 3) + 1
        assert not framed.has(interior, framed.n)

    def test_size_mismatch_rejected(self):
        c2, c3 = build_curve("hilbert", 2), build_curve("hilbert", 3)
        with pytest.raises(ValueError):
            tm_add_outer_frame(tm_oracle_from_curve(c2), c3)


class TestFromAugmented:
    def test_diagonal_support_gives_diagonal_relation(self):
        m = 4
        aug = augment_support(SupportSet(resolution=m,
                                         cells=frozenset((k, k) for k in range(m))))
        tm = tm_from_augmented(aug)
        assert tm.n == m
        assert tm.pairs == frozenset((k, k) for k in range(1, m + 1))

    def test_shared_column_links_rows(self):
        # rows 0 and 1 meet in column 1; augmentation completes the
        # rectangle, and the relation records the row pair once, 1-based
        sup = SupportSet(resolution=3,
                         cells=frozenset({(0, 0), (0, 1), (1, 1), (2, 2)}))
        aug = augment_support(sup)
        tm = tm_from_augmented(aug)
        assert tm.has(1, 2)
        assert not tm.has(1, 3) and not tm.has(2, 3)
        assert tm.n == 3


class TestGraphFromTm:
    def test_consecutive_only_relation_gives_path(self):
        n = 7
        tm = IntersectionSet(n=n, pairs=frozenset((i, i + 1) for i in range(1, n)))
        g = graph_from_tm(tm, n)
        assert sorted(g.edges) == [(i, i + 1) for i in range(1, n)]

    def test_ungrouped_relation_cannot_see_sides(self):
        # at block size one every rank touches at least three blocks, so
        # no witness survives and only the consecutive edges remain; side
        # recovery genuinely needs the refined relation below
        tm = tm_oracle_from_curve(build_curve("hilbert", 1))
        g = graph_from_tm(tm, 4)
        assert sorted(g.edges) == [(1, 2), (2, 3), (3, 4)]

    @pytest.mark.parametrize("kind,depths", [("hilbert", (1, 2, 3)),
                                             ("moore", (2, 3))])
    def test_two_level_refinement_recovers_side_sharing(self, kind, depths):
        for depth in depths:
            coarse = build_curve(kind, depth)
            fine = build_curve(kind, depth + 2)
            got = graph_from_tm(tm_oracle_from_curve(fine), coarse.n_cells)
            assert got.edges == side_sharing_graph(coarse).edges, (kind, depth)

    def test_block_count_must_divide(self):
        tm = tm_oracle_from_curve(build_curve("hilbert", 2))
        with pytest.raises(ValueError):
            graph_from_tm(tm, 5)
        with pytest.raises(ValueError):
            graph_from_tm(tm, 0)


class TestCutTimes:
    def test_consecutive_relation_cuts_everywhere(self):
        n = 6
        tm = IntersectionSet(n=n, pairs=frozenset((i, i + 1) for i in range(1, n)))
        assert cut_times(tm).ranks == tuple(range(1, n + 1))

    def test_single_long_contact_blocks_inner_rank(self):
        tm = IntersectionSet(n=5, pairs=frozenset(
            {(1, 2), (2, 3), (3, 4), (4, 5), (2, 4)}))
        assert cut_times(tm).ranks == (1, 2, 4, 5)
        assert cut_times(tm, 2, 4).ranks == (2, 4)

    def test_two_lobes_pinch_at_junction(self):
        # two filled stretches meeting at rank 5 and nowhere else
        pairs = {(i, i + 1) for i in range(1, 9)}
        pairs |= {(1, 3), (2, 4), (1, 5), (3, 5)}
        pairs |= {(5, 7), (6, 8), (5, 9), (7, 9)}
        tm = IntersectionSet(n=9, pairs=frozenset(pairs))
        assert cut_times(tm).ranks == (1, 5, 9)

    @pytest.mark.parametrize("depth", [2, 3])
    def test_filled_square_keeps_only_ends(self, depth):
        curve = build_curve("hilbert", depth)
        tm = tm_oracle_from_curve(curve)
        assert cut_times(tm).ranks == (1, curve.n_cells)

    def test_range_validated(self):
        tm = IntersectionSet(n=4, pairs=frozenset())
        with pytest.raises(ValueError):
            cut_times(tm, 0, 4)
        with pytest.raises(ValueError):
            cut_times(tm, 3, 5)


WORKED = IntersectionSet(n=6, pairs=frozenset(
    {(1, 2), (1, 3), (2, 5), (4, 5), (3, 4), (2, 6), (3, 6), (4, 6)}))


class TestBoundaryTimes:
    def test_hand_instance(self):
        assert boundary_times(WORKED, 1, 5).ranks == (2, 3, 4)

    def test_block_interior_excluded(self):
        # the first four ranks of a depth-2 grid curve fill one corner
        # quadrant; only the grid-corner cell has no contact outside it
        curve = build_curve("hilbert", 2)
        tm = tm_oracle_from_curve(curve)
        corner = curve.rank_of(0, 0) + 1
        assert corner in (1, 2, 3, 4)
        expected = tuple(sorted({1, 2, 3, 4} - {corner}))
        assert boundary_times(tm, 1, 4).ranks == expected

    def test_full_range_empty_without_frame(self):
        tm = tm_oracle_from_curve(build_curve("hilbert", 2))
        assert boundary_times(tm, 1, 16).ranks == ()

    @pytest.mark.parametrize("kind,depth", [("hilbert", 2), ("hilbert", 3),
                                            ("moore", 2)])
    def test_framed_full_range_is_the_border(self, kind, depth):
        curve = build_curve(kind, depth)
        framed = tm_add_outer_frame(tm_oracle_from_curve(curve), curve)
        got = boundary_times(framed, 1, curve.n_cells).ranks
        assert got == tuple(sorted(border_ring_ranks(curve)))

    def test_range_validated(self):
        with pytest.raises(ValueError):
            boundary_times(WORKED, 0, 5)
        with pytest.raises(ValueError):
            boundary_times(WORKED, 2, 7)


class TestBoundaryBipartition:
    def test_hand_instance_splits_as_expected(self):
        assert boundary_bipartition(WORKED, 1, 5) == ((1, 2, 5), (1, 3, 4, 5))

    def test_explicit_inset_matches_swept(self):
        assert boundary_bipartition(WORKED, 1, 5, eps=1) == \
            boundary_bipartition(WORKED, 1, 5)

    @pytest.mark.parametrize("depth", [3, 4])
    def test_framed_square_separates_along_the_border(self, depth):
        """Exclusive ranks of each part stay on one geometric arc.

        Ranks near the curve's ends can touch both arcs and are shared;
        away from the ends the split is exactly the left/right border
        split, and no rank ever lands on the wrong side.
        """
        curve = build_curve("hilbert", depth)
        n = curve.n_cells
        framed = tm_add_outer_frame(tm_oracle_from_curve(curve), curve)
        p1, p2 = (set(p) for p in boundary_bipartition(framed, 1, n))
        arc_a, arc_b = geometric_arcs(curve)
        assert p1 | p2 == arc_a | arc_b
        assert {1, n} <= p1 & p2
        ex1, ex2 = p1 - p2, p2 - p1
        assert ex1 and ex2
        first = arc_a if ex1 <= arc_a else arc_b
        second = arc_a if ex2 <= arc_a else arc_b
        assert ex1 <= first and ex2 <= second and first != second
        contacts = framed._neighbor_map()
        for t in (p1 & p2) - {1, n}:
            assert contacts[t] & p1 and contacts[t] & p2

    def test_conjugated_curve_gives_identical_relation_and_split(self):
        curve = build_curve("hilbert", 3)
        other = conjugate(curve)
        assert curve.cells != other.cells
        f1 = tm_add_outer_frame(tm_oracle_from_curve(curve), curve)
        f2 = tm_add_outer_frame(tm_oracle_from_curve(other), other)
        assert f1.pairs == f2.pairs
        assert boundary_bipartition(f1, 1, 64) == boundary_bipartition(f2, 1, 64)

    def test_parts_sorted_and_rerun_identical(self):
        a = boundary_bipartition(WORKED, 1, 5)
        b = boundary_bipartition(WORKED, 1, 5)
        assert a == b
        assert all(list(part) == sorted(part) for part in a)

    def test_degenerate_instances_rejected(self):
        # a 4x4 square is too small: the two-cell arc between the curve
        # ends cannot be inset away from the corner contacts that bridge
        # the arcs, so no inset yields two components
        curve = build_curve("hilbert", 2)
        framed = tm_add_outer_frame(tm_oracle_from_curve(curve), curve)
        with pytest.raises(ValueError, match="two arcs"):
            boundary_bipartition(framed, 1, 16)
        # without a frame the full range has no boundary at all
        bare = tm_oracle_from_curve(curve)
        with pytest.raises(ValueError, match="two arcs"):
            boundary_bipartition(bare, 1, 16)

    def test_input_validated(self):
        with pytest.raises(ValueError):
            boundary_bipartition(WORKED, 1, 2)
        with pytest.raises(ValueError):
            boundary_bipartition(WORKED, 1, 5, eps=0)
        with pytest.raises(ValueError):
            boundary_bipartition(WORKED, 0, 5)


class TestBoundaryPath:
    def test_hand_instance_walk(self):
        # part {1,2,5} has the smaller first exclusive rank, so it is
        # traced first, ascending; the other part comes back reversed
        assert boundary_path(WORKED, 1, 5) == (1, 2, 5, 4, 3, 1)

    def test_endpoints_sit_at_the_junctions(self):
        walk = boundary_path(WORKED, 1, 5)
        assert walk[0] == walk[-1] == 1
        assert walk.count(5) == 1

    @pytest.mark.parametrize("depth", [3, 4])
    def test_framed_square_walk_closes_and_covers(self, depth):
        curve = build_curve("hilbert", depth)
        n = curve.n_cells
        framed = tm_add_outer_frame(tm_oracle_from_curve(curve), curve)
        walk = boundary_path(framed, 1, n)
        assert walk[0] == walk[-1] == 1
        assert set(walk) == set(border_ring_ranks(curve))
        assert walk == boundary_path(framed, 1, n)

    def test_endpoint_off_one_arc_rejected(self):
        # rank 1 only ever touches the low arc here
        tm = IntersectionSet(n=6, pairs=frozenset(
            {(1, 2), (2, 5), (4, 5), (3, 4), (2, 6), (3, 6), (4, 6)}))
        assert boundary_bipartition(tm, 1, 5) == ((1, 2, 5), (3, 4, 5))
        with pytest.raises(ValueError, match="both boundary arcs"):
            boundary_path(tm, 1, 5)
