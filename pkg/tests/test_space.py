import json

import numpy as np
import pytest
from hypothesis import given

from timedgh.generators import gen_cycle, gen_interval
from timedgh.space import (
    InvalidSpaceError,
    causal_matrix,
    causal_relation,
    diagnose,
    diameter,
    load_space,
    save_space,
    triangle_violations,
    validate_space,
)

from conftest import make_space, random_spaces


def kinds(exc):
    return {d.kind for d in exc.value.diagnostics}


def test_lipschitz_equality_case_is_valid():
    X = make_space([[0, 1], [1, 0]], [0, 1], tau_max=1)
    assert X.n == 2 and X.tau_max == 1.0


def test_lipschitz_violation_names_pair():
    with pytest.raises(InvalidSpaceError) as exc:
        make_space([[0, 1], [1, 0]], [0, 1.5])
    (d,) = [d for d in exc.value.diagnostics if d.kind == "lipschitz"]
    assert d.indices == (0, 1)
    assert d.excess == pytest.approx(0.5)


def test_triangle_violation_names_triple():
    with pytest.raises(InvalidSpaceError) as exc:
        make_space([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    tri = [d for d in exc.value.diagnostics if d.kind == "triangle"]
    assert [d.indices for d in tri] == [(0, 1, 2)]


@pytest.mark.parametrize("dist,time,kind", [
    ([[0, -1], [-1, 0]], [0, 0], "negative"),
    ([[1, 1], [1, 0]], [0, 0], "diagonal"),
    ([[0, 1], [2, 0]], [0, 0], "asymmetry"),
    ([[0, 0], [0, 0]], [0, 0], "indefinite"),
    ([[0, 1], [1, 0]], [0, -0.5], "time_range"),
])
def test_each_invariant_is_reported(dist, time, kind):
    with pytest.raises(InvalidSpaceError) as exc:
        make_space(dist, time)
    assert kind in kinds(exc)


def test_shape_problems_are_diagnosed():
    for doc in ({"dist": [[0, 1]], "time": [0]}, {"dist": [[0]], "time": [0, 1]},
                {"dist": [], "time": []}, {"time": [0]},
                {"dist": [[0, np.nan], [np.nan, 0]], "time": [0, 0]}):
        diags, cleaned = diagnose(doc)
        assert diags and cleaned is None


def test_diameter_bound_and_labels():
    with pytest.raises(InvalidSpaceError) as exc:
        make_space([[0, 2], [2, 0]], diameter_bound=1)
    assert "diameter_bound" in kinds(exc)
    with pytest.raises(InvalidSpaceError) as exc:
        validate_space({"points": ["a", "a"], "dist": [[0, 1], [1, 0]], "time": [0, 0]})
    assert "labels" in kinds(exc)


def test_tolerance_symmetrizes_small_asymmetry():
    X = validate_space({"dist": [[0, 1.0], [1.0 + 1e-6, 0]], "time": [0, 0]}, tol=1e-5)
    assert X.dist[0, 1] == X.dist[1, 0] == pytest.approx(1.0 + 5e-7)


def test_repair_is_opt_in():
    bad = {"dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]], "time": [0, 0, 0]}
    with pytest.raises(InvalidSpaceError):
        validate_space(bad)
    X = validate_space(bad, repair=True)
    assert X.dist[0, 2] == 2.0


def test_validated_arrays_are_read_only():
    X = make_space([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        X.dist[0, 1] = 3


def test_tau_max_defaults_to_max_time():
    assert make_space([[0, 1], [1, 0]], [0, 0.25]).tau_max == 0.25


def test_causal_examples():
    X = make_space([[0, 1], [1, 0]], [0, 1])
    J = causal_relation(X)
    assert (1, 0) in J and (0, 1) not in J
    Y = make_space([[0, 1], [1, 0]], [0, 0.5])
    assert causal_relation(Y).pairs == {(0, 0), (1, 1)}


def test_three_point_chain_has_six_pairs():
    X = gen_interval(3, 2.0)
    assert np.array_equal(X.time, [0, 1, 2])
    J = causal_relation(X)
    assert len(J) == 6
    assert J.pairs == {(0, 0), (1, 1), (2, 2), (1, 0), (2, 1), (2, 0)}
    assert J.future_of(0) == {0, 1, 2}


def test_diameter_examples():
    assert diameter(make_space([[0]])) == 0.0
    assert diameter(make_space([[0, 1], [1, 0]])) == 1.0
    assert diameter(gen_cycle(4)) == 0.5


def test_save_load_round_trip(tmp_path):
    X = gen_interval(5, 1.5)
    path = tmp_path / "x.json"
    save_space(X, path, extra={"note": "kept"})
    assert load_space(path) == X
    assert json.loads(path.read_text())["note"] == "kept"


def test_with_time_revalidates():
    X = gen_cycle(4)
    assert np.array_equal(X.with_time([0, 0.25, 0.5, 0.25]).time, [0, 0.25, 0.5, 0.25])
    with pytest.raises(InvalidSpaceError):
        X.with_time([0, 1, 0, 0])


@given(random_spaces)
def test_validation_is_idempotent(X):
    assert validate_space(X) is X
    assert validate_space(X.to_dict()) == X


@given(random_spaces)
def test_generated_spaces_have_no_triangle_violations(X):
    assert triangle_violations(X.dist) == []
    assert np.all(np.abs(X.time[:, None] - X.time[None, :]) <= X.dist)


@given(random_spaces)
def test_zero_eps_matches_strict_equality(X):
    strict = (X.time[:, None] - X.time[None, :]) == X.dist
    np.fill_diagonal(strict, True)
    assert np.array_equal(causal_matrix(X, 0.0), strict)


@given(random_spaces)
def test_causality_transitive_along_geodesic_chains(X):
    J = causal_matrix(X, 0.0)
    d = X.dist
    n = X.n
    for p in range(n):
        for q in range(n):
            if not J[q, p]:
                continue
            for r in range(n):
                if J[r, q] and d[p, r] == d[p, q] + d[q, r]:
                    assert J[r, p]
