"""Finite timed-metric-spaces: storage, validation and causal structure.

A space is a dense symmetric distance matrix together with a time function
that is Lipschitz with constant one.  Everything in this package consumes
:class:`FiniteTimedMetricSpace` instances built by :func:`validate_space`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

# Comparisons treated as exact are allowed this many ulps of the diameter
# scale, so that matrices produced by ordinary float arithmetic still pass
# with tol=0.
ROUNDING_ULPS = 4
MAX_DIAGNOSTICS_PER_KIND = 50


def rounding_slack(scale: float) -> float:
    return ROUNDING_ULPS * np.finfo(float).eps * max(1.0, float(scale))


@dataclass(frozen=True)
class Diagnostic:
    """One violated invariant, with the indices that witness it (0-based)."""

    kind: str
    indices: tuple[int, ...]
    message: str
    excess: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "indices": list(self.indices),
            "message": self.message,
            "excess": self.excess,
        }


class InvalidSpaceError(ValueError):
    """Raised by :func:`validate_space`; ``diagnostics`` lists every violation."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        kinds = sorted({d.kind for d in self.diagnostics})
        super().__init__(
            f"{len(self.diagnostics)} invariant violation(s): {', '.join(kinds)}"
        )


@dataclass(frozen=True, eq=False)
class FiniteTimedMetricSpace:
    """A validated finite timed-metric-space ``(X, d, tau)``.

    Instances are immutable: the arrays are marked read-only.  Construct
    them through :func:`validate_space` (or the generators), not directly.
    """

    name: str
    points: tuple[str, ...]
    dist: np.ndarray
    time: np.ndarray
    tau_max: float
    diameter_bound: float
    _validated: bool = field(default=False, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    def min_positive_distance(self) -> float | None:
        off = self.dist[~np.eye(self.n, dtype=bool)]
        off = off[off > 0]
        return float(off.min()) if off.size else None

    def with_time(self, time, tau_max: float | None = None, tol: float = 0.0,
                  name: str | None = None) -> "FiniteTimedMetricSpace":
        """Return a copy carrying a different time function (re-validated)."""
        raw = self.to_dict()
        raw["time"] = [float(t) for t in np.asarray(time, dtype=float)]
        if tau_max is None:
            raw.pop("tau_max", None)
        else:
            raw["tau_max"] = float(tau_max)
        if name is not None:
            raw["name"] = name
        return validate_space(raw, tol=tol)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "points": list(self.points),
            "dist": self.dist.tolist(),
            "time": self.time.tolist(),
            "tau_max": self.tau_max,
            "diameter_bound": self.diameter_bound,
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteTimedMetricSpace):
            return NotImplemented
        return (
            self.name == other.name
            and self.points == other.points
            and np.array_equal(self.dist, other.dist)
            and np.array_equal(self.time, other.time)
            and self.tau_max == other.tau_max
            and self.diameter_bound == other.diameter_bound
        )

    __hash__ = object.__hash__


@dataclass(frozen=True)
class CausalRelation:
    """Ordered pairs ``(p, q)`` with ``p`` in the causal future ``J+(q)``."""

    eps_causal: float
    pairs: frozenset[tuple[int, int]]

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def future_of(self, q: int) -> set[int]:
        return {p for p, r in self.pairs if r == q}


def _limited(diags: list[Diagnostic], kind: str, total: int) -> list[Diagnostic]:
    if total > MAX_DIAGNOSTICS_PER_KIND:
        diags = diags[:MAX_DIAGNOSTICS_PER_KIND]
        diags.append(Diagnostic(kind, (), f"{total - MAX_DIAGNOSTICS_PER_KIND} "
                                          f"further {kind} violations omitted"))
    return diags


def triangle_violations(dist: np.ndarray, tol: float = 0.0) -> list[tuple[int, int, int, float]]:
    """All ``(i, j, k, excess)`` with ``d[i,k] > d[i,j] + d[j,k] + tol`` and ``i < k``."""
    n = dist.shape[0]
    found = []
    for j in range(n):
        via = dist[:, j, None] + dist[None, j, :]
        excess = dist - via
        bad = np.argwhere(np.triu(excess > tol, k=1))
        for i, k in bad:
            if j != i and j != k:
                found.append((int(i), j, int(k), float(excess[i, k])))
    found.sort()
    return found


def shortest_path_closure(dist: np.ndarray) -> np.ndarray:
    """Floyd-Warshall closure; the largest metric below ``dist``."""
    d = np.array(dist, dtype=float, copy=True)
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def _coerce(raw: Any) -> dict[str, Any]:
    if isinstance(raw, FiniteTimedMetricSpace):
        return raw.to_dict()
    if isinstance(raw, Mapping):
        return dict(raw)
    raise TypeError(f"cannot read a space from {type(raw).__name__}")


def diagnose(raw: Any, tol: float = 0.0, repair: bool = False
             ) -> tuple[list[Diagnostic], dict[str, Any] | None]:
    """Check candidate space data without raising.

    Returns ``(diagnostics, cleaned)`` where ``cleaned`` holds the
    normalized arrays (symmetrized, optionally metric-repaired) or ``None``
    when the input is too malformed to interpret.
    """
    doc = _coerce(raw)
    diags: list[Diagnostic] = []
    try:
        dist = np.array(doc["dist"], dtype=float)
        time = np.array(doc["time"], dtype=float)
    except (KeyError, ValueError, TypeError) as exc:
        return [Diagnostic("shape", (), f"unreadable dist/time: {exc}")], None
    if dist.size == 0:
        dist = dist.reshape(0, 0)
    n = dist.shape[0]
    if dist.ndim != 2 or dist.shape != (n, n):
        return [Diagnostic("shape", tuple(dist.shape), "dist is not a square matrix")], None
    if time.shape != (n,):
        return [Diagnostic("shape", (n, time.size),
                           f"time has {time.size} entries for {n} points")], None
    if n == 0:
        return [Diagnostic("shape", (), "a space needs at least one point")], None
    points = doc.get("points")
    if points is None:
        points = [f"p{i}" for i in range(n)]
    points = [str(p) for p in points]
    if len(points) != n:
        return [Diagnostic("shape", (len(points), n),
                           f"{len(points)} labels for {n} points")], None
    if len(set(points)) != n:
        diags.append(Diagnostic("labels", (), "point labels are not unique"))
    if not (np.all(np.isfinite(dist)) and np.all(np.isfinite(time))):
        return [Diagnostic("finite", (), "dist and time must be finite")], None

    scale = float(np.abs(dist).max())
    slack = tol + rounding_slack(scale)

    neg = np.argwhere(dist < 0)
    for i, k in neg[:MAX_DIAGNOSTICS_PER_KIND]:
        diags.append(Diagnostic("negative", (int(i), int(k)),
                                f"d({points[i]},{points[k]}) = {dist[i, k]} < 0",
                                float(-dist[i, k])))
    for i in np.flatnonzero(np.diag(dist) != 0):
        diags.append(Diagnostic("diagonal", (int(i), int(i)),
                                f"d({points[i]},{points[i]}) = {dist[i, i]} != 0",
                                float(abs(dist[i, i]))))
    asym = np.abs(dist - dist.T)
    bad = np.argwhere(np.triu(asym > slack, k=1))
    for i, k in bad[:MAX_DIAGNOSTICS_PER_KIND]:
        diags.append(Diagnostic("asymmetry", (int(i), int(k)),
                                f"d({points[i]},{points[k]}) != d({points[k]},{points[i]})",
                                float(asym[i, k])))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)

    if repair:
        dist = shortest_path_closure(dist)
    zero = np.argwhere(np.triu(dist <= 0, k=1))
    for i, k in zero[:MAX_DIAGNOSTICS_PER_KIND]:
        diags.append(Diagnostic("indefinite", (int(i), int(k)),
                                f"distinct points {points[i]},{points[k]} at distance 0"))

    tri = triangle_violations(dist, slack)
    diags.extend(_limited(
        [Diagnostic("triangle", (i, j, k),
                    f"d({points[i]},{points[k]}) > d({points[i]},{points[j]}) "
                    f"+ d({points[j]},{points[k]})", e) for i, j, k, e in tri],
        "triangle", len(tri)))

    lip = np.abs(time[:, None] - time[None, :]) - dist
    bad = np.argwhere(np.triu(lip > slack, k=1))
    diags.extend(_limited(
        [Diagnostic("lipschitz", (int(i), int(k)),
                    f"|tau({points[i]}) - tau({points[k]})| > d({points[i]},{points[k]})",
                    float(lip[i, k])) for i, k in bad],
        "lipschitz", len(bad)))

    tau_max = doc.get("tau_max")
    tau_max = float(time.max()) if tau_max is None else float(tau_max)
    if tau_max < 0:
        diags.append(Diagnostic("time_range", (), f"tau_max = {tau_max} < 0"))
    for i in np.flatnonzero((time < -tol) | (time > tau_max + tol)):
        diags.append(Diagnostic("time_range", (int(i),),
                                f"tau({points[i]}) = {time[i]} outside [0, {tau_max}]"))
    time = np.clip(time, 0.0, max(tau_max, 0.0))

    diam = float(dist.max())
    bound = doc.get("diameter_bound")
    bound = diam if bound is None else float(bound)
    if diam > bound + slack:
        diags.append(Diagnostic("diameter_bound", (),
                                f"diameter {diam} exceeds bound {bound}", diam - bound))
    cleaned = {
        "name": str(doc.get("name", "")),
        "points": tuple(points),
        "dist": dist,
        "time": time,
        "tau_max": tau_max,
        "diameter_bound": bound,
    }
    return diags, cleaned


def validate_space(raw: Any, tol: float = 0.0, repair: bool = False) -> FiniteTimedMetricSpace:
    """Validate candidate space data and return an immutable space.

    Args:
        raw: a mapping in the JSON space-document layout, or an existing
            space (validation is then idempotent).
        tol: absolute slack accepted on symmetry, triangle and Lipschitz
            checks.  Asymmetry within ``tol`` is repaired by averaging.
        repair: opt-in shortest-path closure of the distance matrix, run
            before the triangle check.  Never applied silently.

    Raises:
        InvalidSpaceError: listing every violated invariant.
    """
    if isinstance(raw, FiniteTimedMetricSpace) and raw._validated and not repair:
        return raw
    diags, cleaned = diagnose(raw, tol=tol, repair=repair)
    if diags:
        raise InvalidSpaceError(diags)
    assert cleaned is not None
    dist = cleaned["dist"]
    time = cleaned["time"]
    dist.setflags(write=False)
    time.setflags(write=False)
    return FiniteTimedMetricSpace(
        name=cleaned["name"],
        points=cleaned["points"],
        dist=dist,
        time=time,
        tau_max=cleaned["tau_max"],
        diameter_bound=cleaned["diameter_bound"],
        _validated=True,
    )


def default_eps_causal(X: FiniteTimedMetricSpace) -> float:
    return 1e-9 * max(1.0, X.diameter_bound)


def causal_matrix(X: FiniteTimedMetricSpace, eps_causal: float | None = None) -> np.ndarray:
    """Boolean matrix ``M[p, q]`` = ``p`` in ``J+(q)``."""
    if eps_causal is None:
        eps_causal = default_eps_causal(X)
    gap = (X.time[:, None] - X.time[None, :]) - X.dist
    m = np.abs(gap) <= eps_causal
    np.fill_diagonal(m, True)
    return m


def causal_relation(X: FiniteTimedMetricSpace, eps_causal: float | None = None) -> CausalRelation:
    """Pairs with ``tau(p) - tau(q) = d(p, q)`` up to ``eps_causal``."""
    if eps_causal is None:
        eps_causal = default_eps_causal(X)
    m = causal_matrix(X, eps_causal)
    pairs = frozenset((int(p), int(q)) for p, q in np.argwhere(m))
    return CausalRelation(eps_causal=float(eps_causal), pairs=pairs)


def diameter(X: FiniteTimedMetricSpace) -> float:
    return float(X.dist.max()) if X.n else 0.0


def load_space(path: str | Path, tol: float = 0.0, repair: bool = False) -> FiniteTimedMetricSpace:
    with open(path) as fh:
        return validate_space(json.load(fh), tol=tol, repair=repair)


def save_space(X: FiniteTimedMetricSpace, path: str | Path, extra: Mapping[str, Any] | None = None) -> None:
    doc = X.to_dict()
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
