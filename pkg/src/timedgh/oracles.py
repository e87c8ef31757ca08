"""Brute-force reference distances for tiny spaces.

A frame on ``X`` and a frame on ``Y`` with shared coordinate meaning is a
sequence of landmark pairs ``(x_k, y_k)``; for the embeddings to reach
every point, both projections must be onto, i.e. the pair set is a
correspondence.  Adding pairs only adds coordinates, which can only raise
sup distances, so the minimum over frames is attained on minimal
correspondences (star forests in the complete bipartite graph).  Every
minimal correspondence has the form ``graph(f) | graph(g)^T`` for maps
``f: X -> Y`` and ``g: Y -> X``, which is how they are enumerated.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

from .space import FiniteTimedMetricSpace

MAX_CANDIDATES = 10**6
MAX_PAIRS = 25


class OracleSizeError(ValueError):
    """Input too large for exhaustive search."""


def _all_maps(n: int, m: int) -> np.ndarray:
    """Every map ``{0..n-1} -> {0..m-1}`` as rows of length ``n``."""
    if n == 0:
        return np.zeros((1, 0), dtype=int)
    return np.array(list(itertools.product(range(m), repeat=n)), dtype=int).reshape(-1, n)


def _check_sizes(n: int, m: int) -> None:
    if n == 0 or m == 0:
        raise ValueError("spaces must be non-empty")
    count = m**n * n**m
    if count > MAX_CANDIDATES * 10:
        raise OracleSizeError(f"{count} map pairs for sizes ({n}, {m})")
    if n * m > MAX_PAIRS:
        raise OracleSizeError(f"{n} x {m} pair grid exceeds {MAX_PAIRS}")


def gh_exact(X: FiniteTimedMetricSpace, Y: FiniteTimedMetricSpace,
             max_candidates: int = MAX_CANDIDATES) -> float:
    """Gromov-Hausdorff distance: half the least distortion of a correspondence."""
    n, m = X.n, Y.n
    if n == 0 or m == 0:
        raise ValueError("spaces must be non-empty")
    count = m**n * n**m
    if count > max_candidates:
        raise OracleSizeError(f"{count} correspondence candidates exceed {max_candidates}")
    dX, dY = X.dist, Y.dist
    F = _all_maps(n, m)  # f: X -> Y
    G = _all_maps(m, n)  # g: Y -> X
    dis_f = np.abs(dX[None] - dY[F[:, :, None], F[:, None, :]]).max(axis=(1, 2))
    dis_g = np.abs(dX[G[:, :, None], G[:, None, :]] - dY[None]).max(axis=(1, 2))
    A = dY[F]                         # A[f, x, y] = dY(f(x), y)
    B = dX[:, G].transpose(1, 0, 2)   # B[g, x, y] = dX(x, g(y))
    best = np.inf
    step = max(1, MAX_CANDIDATES // max(1, len(G) * n * m))
    for s in range(0, len(F), step):
        cross = np.abs(A[s:s + step, None] - B[None]).max(axis=(2, 3))
        total = np.maximum(cross, np.maximum(dis_f[s:s + step, None], dis_g[None, :]))
        best = min(best, float(total.min()))
    return best / 2


@lru_cache(maxsize=64)
def minimal_correspondences(n: int, m: int) -> np.ndarray:
    """Boolean masks over the ``n*m`` pairs (pair ``x*m + y``), one row per
    minimal correspondence."""
    _check_sizes(n, m)
    F = _all_maps(n, m)
    G = _all_maps(m, n)
    xs = np.arange(n)
    ys = np.arange(m)
    bit_f = (np.int64(1) << (xs[None, :] * m + F).astype(np.int64)).sum(axis=1)
    bit_g = (np.int64(1) << (G * m + ys[None, :]).astype(np.int64)).sum(axis=1)
    found = []
    step = max(1, MAX_CANDIDATES // len(bit_g))
    for s in range(0, len(bit_f), step):
        found.append(np.unique(bit_f[s:s + step, None] | bit_g[None, :]))
    codes = np.unique(np.concatenate(found))
    masks = ((codes[:, None] >> np.arange(n * m, dtype=np.int64)) & 1).astype(bool)
    grid = masks.reshape(-1, n, m)
    deg_x = grid.sum(axis=2)
    deg_y = grid.sum(axis=1)
    # An edge is redundant when both ends have another edge.
    redundant = grid & (deg_x[:, :, None] > 1) & (deg_y[:, None, :] > 1)
    masks = masks[~redundant.any(axis=(1, 2))]
    masks.setflags(write=False)
    return masks


def _kappa(X: FiniteTimedMetricSpace, Y: FiniteTimedMetricSpace, timed: bool) -> float:
    n, m = X.n, Y.n
    masks = minimal_correspondences(n, m)
    px, py = np.divmod(np.arange(n * m), m)
    # delta[x, y, k]: gap of x and y in the coordinate of pair k
    delta = np.abs(X.dist[:, px][:, None, :] - Y.dist[:, py][None, :, :])
    floor = np.abs(X.time[:, None] - Y.time[None, :]) if timed else np.zeros((n, m))
    best = np.inf
    step = max(1, MAX_CANDIDATES // (n * m * n * m))
    for s in range(0, len(masks), step):
        M = masks[s:s + step]
        S = (delta[None] * M[:, None, None, :]).max(axis=3)
        S = np.maximum(S, floor[None])
        h = np.maximum(S.min(axis=2).max(axis=1), S.min(axis=1).max(axis=1))
        best = min(best, float(h.min()))
    return best


def exact_kappa_gh(X: FiniteTimedMetricSpace, Y: FiniteTimedMetricSpace) -> float:
    """Least sup-norm Hausdorff distance of Frechet clouds over shared frames."""
    return _kappa(X, Y, timed=False)


def exact_kappa_tH(X: FiniteTimedMetricSpace, Y: FiniteTimedMetricSpace) -> float:
    """Least sup-norm Hausdorff distance of timed-Frechet clouds over shared frames."""
    return _kappa(X, Y, timed=True)


def _cycled(order: Sequence[int], length: int) -> np.ndarray:
    return np.array([order[k % len(order)] for k in range(length)], dtype=int)


def kappa_over_permutations(X: FiniteTimedMetricSpace, Y: FiniteTimedMetricSpace,
                            timed: bool = False) -> float:
    """Minimum over orderings of each space's points, shorter list cycled.

    Only a subset of the frames :func:`exact_kappa_gh` searches, so the
    value is never smaller; kept for comparison.
    """
    from .convergence import hausdorff_sup
    from .embedding import embed_cloud

    n, m = X.n, Y.n
    if n > 5 or m > 5:
        raise OracleSizeError("permutation search limited to 5 points")
    length = max(n, m)
    best = np.inf
    for p in itertools.permutations(range(n)):
        A = embed_cloud(X, _cycled(p, length), timed)
        for q in itertools.permutations(range(m)):
            B = embed_cloud(Y, _cycled(q, length), timed)
            best = min(best, hausdorff_sup(A, B))
    return float(best)


def find_timed_isometry(X: FiniteTimedMetricSpace, Y: FiniteTimedMetricSpace,
                        tol: float = 0.0) -> list[int] | None:
    """A bijection ``phi`` (``phi[x]`` in ``Y``) preserving distance and time, or None."""
    n = X.n
    if n != Y.n:
        return None
    phi: list[int] = []
    used = [False] * n

    def extend() -> bool:
        x = len(phi)
        if x == n:
            return True
        for y in range(n):
            if used[y] or abs(X.time[x] - Y.time[y]) > tol:
                continue
            if any(abs(X.dist[x, x2] - Y.dist[y, phi[x2]]) > tol for x2 in range(x)):
                continue
            phi.append(y)
            used[y] = True
            if extend():
                return True
            phi.pop()
            used[y] = False
        return False

    return list(phi) if extend() else None


def timed_isometry_exists(X: FiniteTimedMetricSpace, Y: FiniteTimedMetricSpace,
                          tol: float = 0.0) -> bool:
    return find_timed_isometry(X, Y, tol) is not None
