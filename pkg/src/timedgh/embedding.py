"""Frechet and timed-Frechet maps into finite sup-norm vectors."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .nets import NetHierarchy, MAX_GRID, joint_levels
from .space import FiniteTimedMetricSpace, default_eps_causal


@dataclass(frozen=True, eq=False)
class SupVector:
    """Finite coordinate vector under the sup metric.

    When ``timed`` is set, ``coords[0]`` is the time value.
    """

    coords: np.ndarray
    timed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def time(self) -> float:
        if not self.timed:
            raise ValueError("vector carries no time coordinate")
        return float(self.coords[0])

    def __eq__(self, other):
        if not isinstance(other, SupVector):
            return NotImplemented
        return self.timed == other.timed and np.array_equal(self.coords, other.coords)

    __hash__ = object.__hash__


@dataclass(frozen=True, eq=False)
class EmbeddingFrame:
    """Ordered landmark list on a host space (repeats allowed)."""

    landmarks: np.ndarray
    host: FiniteTimedMetricSpace
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        lm = np.asarray(self.landmarks, dtype=int).ravel()
        if lm.size == 0:
            raise ValueError("a frame needs at least one landmark")
        if lm.min() < 0 or lm.max() >= self.host.n:
            raise IndexError("landmark index out of range")
        object.__setattr__(self, "landmarks", lm)

    def __len__(self) -> int:
        return len(self.landmarks)


def all_points_frame(X: FiniteTimedMetricSpace) -> EmbeddingFrame:
    return EmbeddingFrame(np.arange(X.n), X, tuple(X.points))


def canonical_frame(H: NetHierarchy) -> EmbeddingFrame:
    """Net levels concatenated (``A_1`` then ``A_2`` ...), tuples in lex order.

    Coordinate ``k`` then names the same tuple in every space built on the
    same plan.
    """
    total = H.plan.frame_length()
    if total > MAX_GRID:
        raise MemoryError(f"canonical frame would have {total} landmarks")
    parts, labels = [], []
    for level in range(1, H.depth + 1):
        grid = H.level_points(level)
        parts.append(grid.ravel())
        labels.extend(".".join(str(k + 1) for k in idx) for idx in np.ndindex(grid.shape))
    return EmbeddingFrame(np.concatenate(parts), H.host, tuple(labels))


def _check_point(frame: EmbeddingFrame, X: FiniteTimedMetricSpace, x: int) -> None:
    if frame.host is not X and frame.host != X:
        raise ValueError("frame belongs to a different space")
    if not 0 <= x < X.n:
        raise IndexError(f"point {x} out of range")


def frechet(X: FiniteTimedMetricSpace, frame: EmbeddingFrame, x: int) -> SupVector:
    """``(d(l_1, x), d(l_2, x), ...)``."""
    _check_point(frame, X, x)
    return SupVector(X.dist[frame.landmarks, x].copy(), timed=False)


def timed_frechet(X: FiniteTimedMetricSpace, frame: EmbeddingFrame, x: int) -> SupVector:
    """``(tau(x), d(l_1, x), d(l_2, x), ...)``."""
    _check_point(frame, X, x)
    return SupVector(np.concatenate([[X.time[x]], X.dist[frame.landmarks, x]]), timed=True)


def embed_cloud(X: FiniteTimedMetricSpace, landmarks: np.ndarray, timed: bool) -> np.ndarray:
    """All points at once: row ``x`` is the (timed) Frechet image of ``x``."""
    cloud = X.dist[:, np.asarray(landmarks, dtype=int)]
    if timed:
        cloud = np.concatenate([X.time[:, None], cloud], axis=1)
    return cloud


def sup_distance(u: SupVector, v: SupVector) -> float:
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    if len(u) == 0:
        return 0.0
    return float(np.max(np.abs(u.coords - v.coords)))


def target_causal(u: SupVector, v: SupVector, eps: float = 1e-9) -> bool:
    """Whether ``u`` lies in the causal future of ``v`` in time x l-infinity."""
    if not (u.timed and v.timed):
        raise ValueError("causality needs timed vectors")
    return abs((u.time - v.time) - sup_distance(u, v)) <= eps


def covering_radius(X: FiniteTimedMetricSpace, centers: Sequence[int]) -> float:
    centers = np.asarray(centers, dtype=int)
    return float(X.dist[:, centers].min(axis=1).max())


def truncation_defect(X: FiniteTimedMetricSpace, frame: EmbeddingFrame, eps: float,
                      pairs: Iterable[tuple[int, int]] | None = None) -> float:
    """Largest shortfall ``d(x, y) - |kappa(x) - kappa(y)|_sup`` over ``pairs``.

    The frame must be an ``eps``-net; the defect is then in ``[0, 2 eps]``.
    """
    r = covering_radius(X, frame.landmarks)
    if r > eps:
        raise ValueError(f"frame is not an {eps}-net (covering radius {r})")
    cloud = embed_cloud(X, frame.landmarks, timed=False)
    if pairs is None:
        sup = pairwise_sup(cloud, cloud)
        return float(np.max(X.dist - sup))
    pairs = np.asarray(list(pairs), dtype=int).reshape(-1, 2)
    if pairs.size == 0:
        return 0.0
    sup = np.max(np.abs(cloud[pairs[:, 0]] - cloud[pairs[:, 1]]), axis=1)
    return float(np.max(X.dist[pairs[:, 0], pairs[:, 1]] - sup))


def pairwise_sup(A: np.ndarray, B: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
    """Matrix of sup-distances between the rows of ``A`` and ``B``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"coordinate length mismatch: {A.shape[1]} vs {B.shape[1]}")
    out = np.zeros((A.shape[0], B.shape[0]))
    if A.shape[1] == 0:
        return out
    step = max(1, chunk // max(1, B.shape[0] * A.shape[1]))
    for s in range(0, A.shape[0], step):
        out[s:s + step] = np.max(np.abs(A[s:s + step, None, :] - B[None, :, :]), axis=2)
    return out


def causality_agrees(X: FiniteTimedMetricSpace, frame: EmbeddingFrame | None = None,
                     eps: float | None = None) -> list[tuple[int, int]]:
    """Ordered pairs where target causality and host causality disagree."""
    from .space import causal_matrix

    frame = frame or all_points_frame(X)
    eps = default_eps_causal(X) if eps is None else eps
    host = causal_matrix(X, eps)
    vecs = [timed_frechet(X, frame, x) for x in range(X.n)]
    return [(p, q) for p in range(X.n) for q in range(X.n)
            if target_causal(vecs[p], vecs[q], eps) != bool(host[p, q])]


def joint_frame(hierarchies: Sequence[NetHierarchy]) -> np.ndarray:
    """Distinct landmark rows ``(I^1(a), ..., I^m(a))`` over all tuples ``a``.

    Duplicate columns never change a sup-distance, so comparing clouds on
    these rows is exactly the comparison on the full canonical frames.
    """
    rows = [sigs for sigs, _ in joint_levels(hierarchies)]
    return np.unique(np.concatenate(rows, axis=0), axis=0)


def write_cloud_csv(path: str | Path, X: FiniteTimedMetricSpace, frame: EmbeddingFrame,
                    timed: bool = True) -> None:
    cloud = embed_cloud(X, frame.landmarks, timed)
    names = list(frame.labels) if frame.labels else [f"l{k}" for k in range(len(frame))]
    header = ["label"] + (["tau"] if timed else []) + names
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for label, row in zip(X.points, cloud):
            w.writerow([label] + [repr(float(v)) for v in row])


def read_cloud_csv(path: str | Path) -> tuple[list[str], list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return header, [r[0] for r in body], np.array([[float(v) for v in r[1:]] for r in body])
