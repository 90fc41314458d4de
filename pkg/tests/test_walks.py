import numpy as np
import pytest

from permurec.walks import (
    WalkPair,
    mated_crt_graph,
    mated_crt_graph_bruteforce,
    sample_walk_pair,
)


def test_hand_built_mating():
    """One valley walk, one monotone walk.

    Floors of L are (0, 0.5, 0.5, 0), so cells 1, 3 and 4 all see the
    valley: (1,3), (2,4) mate across one middle cell and (1,4) across
    two. The decreasing R contributes nothing beyond the path.
    """
    w = WalkPair(L=np.array([0.0, 1.0, 0.5, 1.2, 0.0]),
                 R=np.array([0.0, -1.0, -2.0, -3.0, -4.0]))
    g = mated_crt_graph(w)
    path = {(1, 2), (2, 3), (3, 4)}
    assert g.edges == frozenset(path | {(1, 3), (1, 4), (2, 4)})
    assert mated_crt_graph_bruteforce(w) == g


def test_opposed_monotone_walks_give_exactly_the_path():
    steps = np.arange(7, dtype=float)
    w = WalkPair(L=steps, R=-steps)
    g = mated_crt_graph(w)
    assert g.edges == frozenset((k, k + 1) for k in range(1, 6))


@pytest.mark.parametrize("rho", [-0.8, 0.0, 0.6])
def test_chain_and_bruteforce_agree(rho):
    for seed in range(5):
        w = sample_walk_pair(60, rho, seed)
        assert mated_crt_graph(w) == mated_crt_graph_bruteforce(w)


def test_mated_graph_has_rank_path():
    w = sample_walk_pair(100, -0.5, 3)
    assert mated_crt_graph(w).has_rank_path


def test_bridge_pins_both_ends():
    w = sample_walk_pair(50, 0.3, 1)
    assert w.L[0] == w.R[0] == 0.0
    assert w.L[-1] == w.R[-1] == 0.0
    free = sample_walk_pair(50, 0.3, 1, bridge=False)
    assert free.L[-1] != 0.0


def test_sampler_is_deterministic():
    a = sample_walk_pair(40, 0.2, 9)
    b = sample_walk_pair(40, 0.2, 9)
    assert np.array_equal(a.L, b.L) and np.array_equal(a.R, b.R)


def test_increment_correlation_tracks_rho():
    n, rho = 40000, 0.5
    w = sample_walk_pair(n, rho, 2, bridge=False)
    dL, dR = np.diff(w.L), np.diff(w.R)
    est = float(np.corrcoef(dL, dR)[0, 1])
    # Fisher variance of a sample correlation, five sigmas
    se = (1 - rho**2) / np.sqrt(n)
    assert abs(est - rho) < 5 * se


def test_walk_pair_validation():
    with pytest.raises(ValueError):
        WalkPair(L=np.array([0.5, 1.0]), R=np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        WalkPair(L=np.array([0.0, 1.0]), R=np.array([0.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        WalkPair(L=np.array([0.0]), R=np.array([0.0]))
    with pytest.raises(ValueError):
        WalkPair(L=np.array([0.0, 1.0]), R=np.array([0.0, 1.0]), rho=1.5)


def test_sampler_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sample_walk_pair(0, 0.0)
    with pytest.raises(ValueError):
        sample_walk_pair(10, -1.01)
