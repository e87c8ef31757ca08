import numpy as np
import pytest
from hypothesis import given, strategies as st

from timedgh.convergence import hausdorff_sup
from timedgh.embedding import (
    EmbeddingFrame,
    SupVector,
    all_points_frame,
    canonical_frame,
    causality_agrees,
    embed_cloud,
    frechet,
    joint_frame,
    pairwise_sup,
    read_cloud_csv,
    sup_distance,
    target_causal,
    timed_frechet,
    truncation_defect,
    write_cloud_csv,
)
from timedgh.generators import cycle_family, gen_interval, gen_minkowski_diamond
from timedgh.nets import build_family, dyadic

from conftest import line, make_space, random_spaces


@pytest.fixture
def causal_pair():
    return make_space([[0, 1], [1, 0]], [0, 1])


def test_frechet_two_points(causal_pair):
    F = all_points_frame(causal_pair)
    assert frechet(causal_pair, F, 0).coords.tolist() == [0, 1]
    assert frechet(causal_pair, F, 1).coords.tolist() == [1, 0]


def test_frechet_three_points():
    X = make_space([[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]])
    F = all_points_frame(X)
    u, v = frechet(X, F, 0), frechet(X, F, 1)
    assert u.coords.tolist() == [0, 1, 2]
    assert sup_distance(u, v) == 1.0


def test_timed_frechet_two_points(causal_pair):
    F = all_points_frame(causal_pair)
    p, q = timed_frechet(causal_pair, F, 0), timed_frechet(causal_pair, F, 1)
    assert p.coords.tolist() == [0, 0, 1] and q.coords.tolist() == [1, 1, 0]
    assert sup_distance(p, q) == 1.0
    assert target_causal(q, p) and not target_causal(p, q) and target_causal(p, p)


@pytest.mark.parametrize("u,v,d", [
    ((0, 1), (1, 0), 1), ((0, 1), (0, 1), 0), ((0, 0.5, 2), (1, 0.5, 0), 2)])
def test_sup_distance(u, v, d):
    assert sup_distance(SupVector(u), SupVector(v)) == d


def test_sup_distance_length_mismatch():
    with pytest.raises(ValueError):
        sup_distance(SupVector((0, 1)), SupVector((0,)))
    with pytest.raises(ValueError):
        target_causal(SupVector((0, 1)), SupVector((0, 1)))
    with pytest.raises(ValueError):
        SupVector((1.0,)).time


def test_frame_checks(causal_pair):
    with pytest.raises(ValueError):
        EmbeddingFrame([], causal_pair)
    with pytest.raises(IndexError):
        EmbeddingFrame([2], causal_pair)
    with pytest.raises(IndexError):
        frechet(causal_pair, all_points_frame(causal_pair), 5)


def test_truncation_defect_examples(causal_pair):
    assert truncation_defect(causal_pair, all_points_frame(causal_pair), 0.0) == 0.0
    assert truncation_defect(causal_pair, EmbeddingFrame([0], causal_pair), 1.0) == 0.0
    X = line([0, 1, 2])
    frame = EmbeddingFrame([1], X)
    assert truncation_defect(X, frame, 1.0, pairs=[(0, 2)]) == 2.0
    with pytest.raises(ValueError):
        truncation_defect(X, frame, 0.5)


def test_minkowski_causality_agrees():
    for m in range(1, 9):
        assert causality_agrees(gen_minkowski_diamond(m, 2.0)) == []


def test_canonical_frame_labels_follow_grid():
    X = gen_interval(4)
    plan, (H,) = build_family([X], 2)
    F = canonical_frame(H)
    assert len(F) == plan.frame_length()
    assert F.labels[:plan.sizes[0]] == tuple(str(k) for k in range(1, plan.sizes[0] + 1))
    assert F.labels[plan.sizes[0]] == "1.1"


def test_joint_frame_gives_full_frame_hausdorff():
    fam = cycle_family(6, 4)
    plan, hs = build_family(fam)
    rows = joint_frame(hs[1:3])
    full = [embed_cloud(X, canonical_frame(H).landmarks, True) for X, H in zip(fam[1:3], hs[1:3])]
    comp = [embed_cloud(X, rows[:, k], True) for k, X in enumerate(fam[1:3])]
    assert hausdorff_sup(*full) == hausdorff_sup(*comp)


def test_csv_round_trip(tmp_path):
    X = gen_interval(3)
    F = all_points_frame(X)
    path = tmp_path / "c.csv"
    write_cloud_csv(path, X, F)
    header, labels, data = read_cloud_csv(path)
    assert header == ["label", "tau", "s0", "s1", "s2"]
    assert labels == list(X.points)
    assert np.array_equal(data, embed_cloud(X, F.landmarks, True))


@given(random_spaces)
def test_full_frames_preserve_distance_exactly(X):
    F = all_points_frame(X)
    for timed in (False, True):
        C = embed_cloud(X, F.landmarks, timed)
        assert np.array_equal(pairwise_sup(C, C), X.dist)
        if timed:
            assert np.array_equal(C[:, 0], X.time)


@given(random_spaces)
def test_causality_preserved(X):
    assert causality_agrees(X, eps=1e-9) == []


@given(random_spaces, st.data())
def test_monotone_frames(X, data):
    base = data.draw(st.lists(st.integers(0, X.n - 1), min_size=1, max_size=5))
    more = base + data.draw(st.lists(st.integers(0, X.n - 1), max_size=5))
    A = pairwise_sup(*(2 * [embed_cloud(X, base, False)]))
    B = pairwise_sup(*(2 * [embed_cloud(X, more, False)]))
    assert np.all(A <= B) and np.all(B <= X.dist)


@given(random_spaces)
def test_net_frames_have_small_defect(X):
    _, (H,) = build_family([X])
    for level in range(1, H.depth + 1):
        frame = EmbeddingFrame(H.centers_at(level), X)
        assert 0 <= truncation_defect(X, frame, dyadic(level)) <= 2 * dyadic(level)
