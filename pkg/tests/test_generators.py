import numpy as np
import pytest
from hypothesis import given, strategies as st

from timedgh.generators import (
    cycle_family,
    gen_cycle,
    gen_interval,
    gen_minkowski_diamond,
    gen_random,
    interval_family,
    minkowski_coordinates,
    relabeled,
    scaled,
    time_reversed,
)
from timedgh.space import causal_matrix, validate_space


def test_cycle_examples():
    assert gen_cycle(1).n == 1
    X = gen_cycle(4)
    assert X.dist.max() == 0.5
    assert np.all(X.time == 0)
    assert [float(Y.dist.max()) for Y in cycle_family(4, 4)] == [0.5 / j for j in range(1, 5)]


def test_diamond_examples():
    X = gen_minkowski_diamond(1)
    assert X.n == 1 and X.time[0] == 0
    X = gen_minkowski_diamond(3, 2.0)
    k = {p: i for i, p in enumerate(X.points)}
    a, b = k["u0v0"], k["u1v1"]  # same x, t differs by 1
    assert X.dist[a, b] == 1.0 and causal_matrix(X)[b, a]
    c, d = k["u1v0"], k["u0v1"]  # same t, x differs by 1
    assert X.dist[c, d] == 1.0 and not causal_matrix(X)[c, d] and not causal_matrix(X)[d, c]


@pytest.mark.parametrize("m", range(1, 9))
def test_diamond_causality_is_minkowski(m):
    X = gen_minkowski_diamond(m, 1.5)
    t, x = minkowski_coordinates(m, 1.5)
    # decide causality on the integer lattice so the reference is exact
    unit = 1.5 / (2 * max(m - 1, 1))
    ti, xi = np.rint(t / unit).astype(int), np.rint(x / unit).astype(int)
    dt = ti[:, None] - ti[None, :]
    dx = np.abs(xi[:, None] - xi[None, :])
    analytic = (dt >= dx) & (dt >= 0)
    assert np.array_equal(causal_matrix(X), analytic)
    if m in (2, 3, 5):  # dyadic grid steps: exact equality also works
        assert np.array_equal(causal_matrix(X, 0.0), analytic)


def test_interval_family_shape():
    fam = interval_family(10, 4)
    assert [X.dist.max() for X in fam] == [1 + 1 / j for j in range(1, 5)]
    assert np.array_equal(fam[0].time, fam[0].dist[0])
    assert np.all(gen_interval(5, timed=False).time == 0)


def test_random_needs_seed_and_is_deterministic():
    with pytest.raises(TypeError):
        gen_random(5)
    A, B = gen_random(12, 7), gen_random(12, 7)
    assert A == B
    assert not np.array_equal(A.dist, gen_random(12, 8).dist)


def test_transforms():
    X = gen_random(6, 3, time_mode="cone")
    assert np.array_equal(time_reversed(time_reversed(X)).time, X.time)
    Y = scaled(X, 0.5)
    assert np.array_equal(Y.dist, X.dist * 0.5)
    Z = relabeled(X, [5, 4, 3, 2, 1, 0])
    assert Z.dist[0, 1] == X.dist[5, 4] and Z.points[0] == X.points[5]
    with pytest.raises(ValueError):
        scaled(X, 1.0, time_factor=2.0)


@given(st.integers(1, 25), st.integers(0, 10**6), st.sampled_from(["zero", "cone", "mixed", None]))
def test_random_spaces_validate_at_zero_tol(n, seed, mode):
    X = gen_random(n, seed, time_mode=mode)
    assert validate_space(X.to_dict(), tol=0.0) == X
    assert np.all(np.abs(X.time[:, None] - X.time[None, :]) <= X.dist)


@given(st.integers(1, 20), st.floats(0.01, 10))
def test_cycles_and_intervals_validate(n, scale):
    for X in (gen_cycle(n, scale), gen_interval(n, scale)):
        validate_space(X.to_dict(), tol=0.0)
