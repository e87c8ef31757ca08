"""Test-space generators.

Distances are built from small dyadic rationals wherever possible so that
triangle and Lipschitz checks hold exactly in floating point.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .space import FiniteTimedMetricSpace, shortest_path_closure, validate_space


def _space(name, labels, dist, time, tau_max=None, bound=None) -> FiniteTimedMetricSpace:
    doc = {"name": name, "points": list(labels), "dist": dist, "time": time}
    if tau_max is not None:
        doc["tau_max"] = tau_max
    if bound is not None:
        doc["diameter_bound"] = bound
    return validate_space(doc)


def gen_cycle(n: int, scale: float = 1.0, name: str | None = None) -> FiniteTimedMetricSpace:
    """``n`` equally spaced points on a cycle of length ``scale`` (shortest arc), time 0."""
    if n < 1 or scale <= 0:
        raise ValueError("need n >= 1 and scale > 0")
    k = np.arange(n)
    steps = np.abs(k[:, None] - k[None, :])
    steps = np.minimum(steps, n - steps)
    dist = scale * steps / n
    return _space(name or f"cycle{n}@{scale:g}", [f"c{i}" for i in k], dist, np.zeros(n))


def gen_interval(n: int, scale: float = 1.0, timed: bool = True,
                 name: str | None = None) -> FiniteTimedMetricSpace:
    """``n`` equally spaced points on ``[0, scale]``.

    With ``timed`` the time is the position, so the points form one causal chain.
    """
    if n < 1 or scale <= 0:
        raise ValueError("need n >= 1 and scale > 0")
    pos = scale * np.arange(n) / max(n - 1, 1)
    dist = np.abs(pos[:, None] - pos[None, :])
    time = pos.copy() if timed else np.zeros(n)
    return _space(name or f"interval{n}@{scale:g}", [f"s{i}" for i in range(n)], dist, time)


def gen_minkowski_diamond(m: int, T: float = 1.0, name: str | None = None) -> FiniteTimedMetricSpace:
    """``m x m`` null-coordinate grid on the causal diamond of height ``T`` in 1+1 Minkowski.

    Time is ``t - t_min``; distance is the null distance of the flat
    diamond, ``max(|dt|, |dx|)``.
    """
    if m < 1 or T <= 0:
        raise ValueError("need m >= 1 and T > 0")
    u, v = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    u, v = u.ravel(), v.ravel()
    twice_t, twice_x = u + v, u - v  # integers: 2(m-1)/T times (t, x)
    unit = T / (2 * max(m - 1, 1))
    steps = np.maximum(np.abs(twice_t[:, None] - twice_t[None, :]),
                       np.abs(twice_x[:, None] - twice_x[None, :]))
    dist = unit * steps
    time = unit * twice_t
    labels = [f"u{a}v{b}" for a, b in zip(u, v)]
    return _space(name or f"diamond{m}@{T:g}", labels, dist, time)


def minkowski_coordinates(m: int, T: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """``(t, x)`` of the diamond grid points, in generator order."""
    u, v = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    unit = T / (2 * max(m - 1, 1))
    return unit * (u + v).ravel(), unit * (u - v).ravel()


def gen_random(n: int, seed: int, unit: float = 1 / 32, max_weight: int = 16,
               edge_prob: float = 0.3, time_mode: str | None = None,
               name: str | None = None) -> FiniteTimedMetricSpace:
    """Shortest-path metric of a random connected graph with dyadic weights.

    ``time_mode`` is one of ``"zero"``, ``"cone"`` (distance from a base
    point), ``"mixed"`` (minimum of shifted cones) or ``None`` to draw one.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.default_rng(seed)
    w = np.full((n, n), np.inf)
    np.fill_diagonal(w, 0.0)
    order = rng.permutation(n)
    for k in range(1, n):
        a, b = order[k], order[rng.integers(k)]
        w[a, b] = w[b, a] = unit * rng.integers(2, max_weight + 1)
    extra = np.triu(rng.random((n, n)) < edge_prob, k=1)
    for a, b in np.argwhere(extra):
        w[a, b] = w[b, a] = min(w[a, b], unit * rng.integers(2, max_weight + 1))
    dist = shortest_path_closure(w)
    if time_mode is None:
        time_mode = str(rng.choice(["zero", "cone", "mixed", "mixed"]))
    if time_mode == "zero":
        time = np.zeros(n)
    elif time_mode == "cone":
        time = dist[rng.integers(n)].copy()
    elif time_mode == "mixed":
        bases = rng.choice(n, size=min(n, int(rng.integers(1, 4))), replace=False)
        offsets = unit * rng.integers(0, 2 * max_weight, size=len(bases))
        time = np.min(dist[bases] + offsets[:, None], axis=0)
        time -= time.min()
    else:
        raise ValueError(f"unknown time_mode {time_mode!r}")
    return _space(name or f"random{n}s{seed}", [f"x{i}" for i in range(n)], dist, time)


def gen_random_small(n: int, seed: int) -> FiniteTimedMetricSpace:
    """Tiny random space for the exhaustive oracles (coarser weights)."""
    return gen_random(n, seed, unit=1 / 8, max_weight=8, edge_prob=0.5)


def scaled(X: FiniteTimedMetricSpace, factor: float, time_factor: float | None = None,
           name: str | None = None) -> FiniteTimedMetricSpace:
    """``X`` with distances times ``factor`` (time times ``time_factor``, default same)."""
    tf = factor if time_factor is None else time_factor
    if factor <= 0 or tf < 0 or tf > factor:
        raise ValueError("need factor > 0 and 0 <= time_factor <= factor")
    return _space(name or f"{X.name}*{factor:g}", X.points, X.dist * factor, X.time * tf)


def time_reversed(X: FiniteTimedMetricSpace, name: str | None = None) -> FiniteTimedMetricSpace:
    """Same metric with ``tau -> tau_max - tau``."""
    return _space(name or f"{X.name}~rev", X.points, X.dist, X.tau_max - X.time, X.tau_max)


def relabeled(X: FiniteTimedMetricSpace, perm, name: str | None = None) -> FiniteTimedMetricSpace:
    """Point ``k`` of the result is point ``perm[k]`` of ``X``."""
    perm = np.asarray(perm, dtype=int)
    return _space(name or f"{X.name}~perm", [X.points[p] for p in perm],
                  X.dist[np.ix_(perm, perm)], X.time[perm], X.tau_max)


def family(make: Callable[[int], FiniteTimedMetricSpace], J: int) -> list[FiniteTimedMetricSpace]:
    """``[make(1), ..., make(J)]``."""
    return [make(j) for j in range(1, J + 1)]


def cycle_family(n: int, J: int) -> list[FiniteTimedMetricSpace]:
    """Collapsing cycles, member ``j`` at scale ``1/j``."""
    return family(lambda j: gen_cycle(n, 1.0 / j, name=f"cycle{n}_j{j}"), J)


def interval_family(n: int, J: int, timed: bool = True) -> list[FiniteTimedMetricSpace]:
    """Intervals with distances ``(1 + 1/j)`` times the unit interval's."""
    return family(lambda j: gen_interval(n, 1.0 + 1.0 / j, timed=timed,
                                         name=f"interval{n}_j{j}"), J)
