import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from timedgh.convergence import timed_hausdorff_ub
from timedgh.generators import gen_random_small, relabeled, time_reversed
from timedgh.oracles import (
    OracleSizeError,
    exact_kappa_gh,
    exact_kappa_tH,
    find_timed_isometry,
    gh_exact,
    kappa_over_permutations,
    minimal_correspondences,
    timed_isometry_exists,
)

from conftest import make_space, tiny_spaces

TOL = 1e-12
POINT = make_space([[0]])
PAIR1 = make_space([[0, 1], [1, 0]])
PAIR2 = make_space([[0, 2], [2, 0]])
PATH3 = make_space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
TRI = make_space([[0, 1, 1], [1, 0, 1], [1, 1, 0]])


def relations(n, m):
    """Every correspondence between n and m points, as pair lists."""
    pairs = list(itertools.product(range(n), range(m)))
    for mask in range(1, 1 << len(pairs)):
        R = [p for k, p in enumerate(pairs) if mask >> k & 1]
        if {x for x, _ in R} == set(range(n)) and {y for _, y in R} == set(range(m)):
            yield R


def brute_gh(X, Y):
    best = np.inf
    for R in relations(X.n, Y.n):
        dis = max(abs(X.dist[x, x2] - Y.dist[y, y2]) for x, y in R for x2, y2 in R)
        best = min(best, dis)
    return best / 2


def brute_kappa(X, Y, timed):
    best = np.inf
    for R in relations(X.n, Y.n):
        def vec(S, p, side):
            v = [S.dist[p, r[side]] for r in R]
            return ([S.time[p]] if timed else []) + v

        A = [vec(X, x, 0) for x in range(X.n)]
        B = [vec(Y, y, 1) for y in range(Y.n)]
        sup = [[max(abs(s - t) for s, t in zip(a, b)) for b in B] for a in A]
        h = max(max(min(row) for row in sup), max(min(col) for col in zip(*sup)))
        best = min(best, h)
    return best


@pytest.mark.parametrize("X,Y,value", [
    (PAIR1, PAIR1, 0.0), (POINT, PAIR1, 0.5), (PAIR1, PAIR2, 0.5), (PATH3, TRI, 0.5)])
def test_gh_values(X, Y, value):
    assert gh_exact(X, Y) == value == brute_gh(X, Y)


@pytest.mark.parametrize("X,Y,value", [
    (PAIR1, PAIR1, 0.0), (POINT, PAIR1, 1.0), (PATH3, TRI, 1.0)])
def test_kappa_gh_values(X, Y, value):
    assert exact_kappa_gh(X, Y) == value == brute_kappa(X, Y, False)
    assert kappa_over_permutations(X, Y) == value


def test_timed_point_values():
    t = 0.375
    A, B = make_space([[0]], [0]), make_space([[0]], [t])
    assert exact_kappa_tH(A, B) == t
    assert timed_hausdorff_ub(A, B) == t


def test_two_point_reversal_is_an_isometry():
    X = make_space([[0, 1], [1, 0]], [0, 1])
    Y = time_reversed(X)
    assert Y.time.tolist() == [1, 0]
    assert exact_kappa_tH(X, X) == 0.0
    assert exact_kappa_tH(X, Y) == 0.0
    assert find_timed_isometry(X, Y) == [1, 0]


def test_reversed_triangle_is_far():
    X = make_space(TRI.dist, [0, 1, 1])
    Y = time_reversed(X)
    assert not timed_isometry_exists(X, Y)
    assert exact_kappa_gh(X, Y) == 0.0
    assert exact_kappa_tH(X, Y) == 1.0 == brute_kappa(X, Y, True)


def test_minimal_correspondences_are_star_forests():
    masks = minimal_correspondences(2, 3).reshape(-1, 2, 3)
    assert np.all(masks.any(axis=1)) and np.all(masks.any(axis=2))
    brute = {frozenset(R) for R in relations(2, 3)
             if not any(sum(1 for p in R if p[0] == x) > 1 and sum(1 for p in R if p[1] == y) > 1
                        for x, y in R)}
    got = {frozenset(map(tuple, np.argwhere(m).tolist())) for m in masks}
    assert got == brute


def test_size_guards():
    big = gen_random_small(7, 0)
    with pytest.raises(OracleSizeError):
        gh_exact(big, big)
    with pytest.raises(OracleSizeError):
        exact_kappa_gh(big, big)
    with pytest.raises(OracleSizeError):
        kappa_over_permutations(big, big)


def test_isometry_search_handles_relabeling():
    X = gen_random_small(5, 11)
    perm = [3, 0, 4, 1, 2]
    Y = relabeled(X, perm)
    phi = find_timed_isometry(Y, X)
    assert phi is not None
    assert np.array_equal(X.dist[np.ix_(phi, phi)], Y.dist)
    assert exact_kappa_tH(X, Y) == 0.0


small_pairs = given(tiny_spaces.filter(lambda X: X.n <= 3), tiny_spaces.filter(lambda X: X.n <= 3))


@small_pairs
@settings(max_examples=40)
def test_matches_relation_brute_force(X, Y):
    assert gh_exact(X, Y) == brute_gh(X, Y)
    assert exact_kappa_gh(X, Y) == brute_kappa(X, Y, False)
    assert exact_kappa_tH(X, Y) == brute_kappa(X, Y, True)


@given(tiny_spaces, tiny_spaces)
def test_sandwich_and_time_ordering(X, Y):
    g, k, kt = gh_exact(X, Y), exact_kappa_gh(X, Y), exact_kappa_tH(X, Y)
    assert g <= k + TOL and k <= 2 * g + TOL
    assert kt >= k - TOL
    assert timed_hausdorff_ub(X, Y) >= kt - TOL
    assert kappa_over_permutations(X, Y, timed=True) >= kt - TOL


@given(tiny_spaces, tiny_spaces)
def test_zero_iff_timed_isometry(X, Y):
    assert (exact_kappa_tH(X, Y) <= TOL) == timed_isometry_exists(X, Y)


@given(tiny_spaces, tiny_spaces)
def test_symmetry(X, Y):
    assert exact_kappa_tH(X, Y) == exact_kappa_tH(Y, X)
    assert gh_exact(X, Y) == gh_exact(Y, X)
