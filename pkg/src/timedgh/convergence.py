"""Hausdorff estimates between embedded spaces and limit synthesis.

A family ``X_1, ..., X_J`` shares one level plan, so a tuple ``a`` names a
center ``I^j(a)`` in every member and coordinate ``a`` of every embedded
cloud means "distance to the center named ``a``".  The limit is assembled
from the per-tuple values ``d^j_{a,b}`` and ``tau^j_a``: the last member
supplies the values, the preceding ``window`` members supply a Cauchy
diagnostic, and tuples at (near) zero distance are glued into classes.

All sups over tuples and addresses are exact but are evaluated on the
distinct center combinations (:func:`timedgh.nets.joint_levels`) rather
than on the product grid, whose size grows geometrically with depth.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .addresses import Address
from .embedding import SupVector, canonical_frame, embed_cloud, joint_frame, pairwise_sup
from .nets import LevelPlan, NetHierarchy, build_family, dyadic, joint_levels
from .space import (
    FiniteTimedMetricSpace,
    InvalidSpaceError,
    rounding_slack,
    validate_space,
)

log = logging.getLogger(__name__)

MAX_REPORTED_PAIRS = 200


class LimitSynthesisError(RuntimeError):
    """The synthesized limit breaks the triangle or Lipschitz bound."""


def hausdorff_sup(A, B) -> float:
    """Sup-norm Hausdorff distance between two finite clouds.

    ``A`` and ``B`` are arrays of shape ``(n, F)`` or sequences of
    :class:`SupVector` of a common length.
    """
    A = _as_cloud(A)
    B = _as_cloud(B)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"coordinate length mismatch: {A.shape[1]} vs {B.shape[1]}")
    if len(A) == 0 or len(B) == 0:
        raise ValueError("Hausdorff distance of an empty cloud")
    sup = pairwise_sup(A, B)
    return float(max(sup.min(axis=1).max(), sup.min(axis=0).max()))


def _as_cloud(C) -> np.ndarray:
    if isinstance(C, np.ndarray):
        return C.reshape(len(C), -1).astype(float)
    rows = [c.coords if isinstance(c, SupVector) else np.asarray(c, dtype=float) for c in C]
    return np.array(rows, dtype=float).reshape(len(rows), -1)


def _pair_clouds(XA: FiniteTimedMetricSpace, XB: FiniteTimedMetricSpace, rows: np.ndarray,
                 timed: bool) -> tuple[np.ndarray, np.ndarray]:
    return embed_cloud(XA, rows[:, 0], timed), embed_cloud(XB, rows[:, 1], timed)


@dataclass(frozen=True, eq=False)
class EmbeddedFamily:
    """Spaces on one shared plan with canonical (timed) Frechet embeddings."""

    spaces: tuple[FiniteTimedMetricSpace, ...]
    plan: LevelPlan
    hierarchies: tuple[NetHierarchy, ...]
    timed: bool = True

    def __len__(self) -> int:
        return len(self.spaces)

    @property
    def diameter_bound(self) -> float:
        return max(X.diameter_bound for X in self.spaces)

    def frame(self, j: int):
        return canonical_frame(self.hierarchies[j])

    def cloud(self, j: int) -> np.ndarray:
        """Full canonical-frame cloud of member ``j`` (rows follow point order)."""
        return embed_cloud(self.spaces[j], self.frame(j).landmarks, self.timed)

    def union_cloud(self) -> np.ndarray:
        """All member clouds stacked: the finite part of ``Z``."""
        return np.concatenate([self.cloud(j) for j in range(len(self))], axis=0)

    def hausdorff(self, j: int, k: int) -> float:
        """Sup-norm Hausdorff distance between the clouds of members ``j`` and ``k``."""
        rows = joint_frame([self.hierarchies[j], self.hierarchies[k]])
        A, B = _pair_clouds(self.spaces[j], self.spaces[k], rows, self.timed)
        return hausdorff_sup(A, B)


def embed_family(spaces: Sequence[FiniteTimedMetricSpace], depth: int | None = None,
                 timed: bool = True) -> EmbeddedFamily:
    """Shared plan, per-member hierarchies, canonical embeddings."""
    spaces = tuple(spaces)
    plan, hs = build_family(spaces, depth)
    return EmbeddedFamily(spaces, plan, tuple(hs), timed)


def timed_hausdorff_ub(X1: FiniteTimedMetricSpace, X2: FiniteTimedMetricSpace,
                       depth: int | None = None, timed: bool = True) -> float:
    """Hausdorff distance of the two canonical timed clouds.

    This is an upper bound on the intrinsic timed Hausdorff distance as
    long as both hierarchies reach every point (the default depth does).
    """
    return embed_family([X1, X2], depth, timed).hausdorff(0, 1)


@dataclass(frozen=True)
class LimitDiagnostics:
    window: int
    tol_cauchy: float
    max_oscillation: float
    max_time_oscillation: float
    nonconvergent_pairs: list[tuple[tuple[int, ...], tuple[int, ...]]]
    nonconvergent_count: int
    nonconvergent_times: list[tuple[int, ...]]
    glue_tolerance: float
    max_class_spread: float
    net_violations: list[tuple[int, int, float]] = field(default_factory=list)
    diameter_excess: float = 0.0

    @property
    def converged(self) -> bool:
        return self.nonconvergent_count == 0 and not self.nonconvergent_times

    @property
    def spread_ok(self) -> bool:
        return self.max_class_spread <= 2 * self.glue_tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_oscillation": self.max_oscillation,
            "nonconvergent_pairs": [[list(a), list(b)] for a, b in self.nonconvergent_pairs],
            "glue_tolerance": self.glue_tolerance,
            "nonconvergent_count": self.nonconvergent_count,
            "nonconvergent_times": [list(a) for a in self.nonconvergent_times],
            "max_time_oscillation": self.max_time_oscillation,
            "window": self.window,
            "tol_cauchy": self.tol_cauchy,
            "max_class_spread": self.max_class_spread,
            "net_violations": [list(v) for v in self.net_violations],
            "diameter_excess": self.diameter_excess,
        }


@dataclass(frozen=True, eq=False)
class LimitSynthesis:
    """Quotient of the tuple set by glued distances, with limit metric and time.

    ``space`` holds one point per class, named by the class representative
    (its lexicographically smallest tuple) in address text form.
    """

    plan: LevelPlan
    space: FiniteTimedMetricSpace
    representatives: tuple[tuple[int, ...], ...]
    representative_points: np.ndarray
    class_of_point: np.ndarray
    last: NetHierarchy
    diagnostics: LimitDiagnostics

    @property
    def limit_dist(self) -> np.ndarray:
        return self.space.dist

    @property
    def limit_time(self) -> np.ndarray:
        return self.space.time

    @property
    def n_classes(self) -> int:
        return self.space.n

    def class_of(self, a: Sequence[int]) -> int:
        """Class ``[a]`` of a tuple at any level."""
        return int(self.class_of_point[self.last.center(tuple(a))])

    def classes_at(self, level: int) -> np.ndarray:
        return np.unique(self.class_of_point[self.last.centers_at(level)])

    def members(self, c: int) -> np.ndarray:
        """Points of the last family member glued into class ``c``."""
        return np.flatnonzero(self.class_of_point == c)

    def to_dict(self) -> dict[str, Any]:
        doc = self.space.to_dict()
        doc["diagnostics"] = self.diagnostics.to_dict()
        doc["representatives"] = [list(r) for r in self.representatives]
        doc["plan"] = self.plan.to_dict()
        return doc


def _tail_signatures(hs: Sequence[NetHierarchy]) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Distinct center vectors over all tuples of every level, with first tuples."""
    best: dict[tuple[int, ...], tuple[int, ...]] = {}
    for sigs, firsts in joint_levels(hs):
        for s, t in zip(map(tuple, sigs.tolist()), firsts):
            if s not in best or t < best[s]:
                best[s] = t
    keys = sorted(best, key=best.get)
    return np.array(keys, dtype=int).reshape(len(keys), len(hs)), [best[k] for k in keys]


def synthesize_limit(family: EmbeddedFamily, window: int = 3, tol_cauchy: float | None = None,
                     delta_glue: float | None = None, class_distance: str = "representative"
                     ) -> LimitSynthesis:
    """Build the limit space of a family from its last ``window + 1`` members.

    ``d^inf_{a,b}`` is taken from the last member; the oscillation of
    ``d^j_{a,b}`` (and ``tau^j_a``) over the preceding ``window`` members is
    reported against ``tol_cauchy``.  Tuples whose last-member centers are
    within ``delta_glue`` (transitively) form one class.  Classes are
    measured between representatives, or by the largest cross distance
    when ``class_distance="max"``.

    Non-convergence is reported in the diagnostics, not raised.

    Raises:
        ValueError: family shorter than ``window + 1``.
        LimitSynthesisError: limit violates triangle or Lipschitz bounds.
    """
    J = len(family)
    if window < 1 or J < window + 1:
        raise ValueError(f"need at least window + 1 = {window + 1} members, got {J}")
    if class_distance not in ("representative", "max"):
        raise ValueError(f"unknown class_distance {class_distance!r}")
    D = family.diameter_bound
    tol_cauchy = 1e-3 * max(1.0, D) if tol_cauchy is None else tol_cauchy
    L = family.plan.depth
    delta_glue = dyadic(L) if delta_glue is None else delta_glue
    tail_spaces = family.spaces[J - 1 - window:]
    tail = family.hierarchies[J - 1 - window:]
    XJ, HJ = tail_spaces[-1], tail[-1]

    # Cauchy diagnostics over the tail window.
    sigs, firsts = _tail_signatures(tail)
    last = sigs[:, -1]
    dJ = XJ.dist[np.ix_(last, last)]
    tJ = XJ.time[last]
    osc = np.zeros_like(dJ)
    tosc = np.zeros_like(tJ)
    for k, X in enumerate(tail_spaces[:-1]):
        col = sigs[:, k]
        np.maximum(osc, np.abs(X.dist[np.ix_(col, col)] - dJ), out=osc)
        np.maximum(tosc, np.abs(X.time[col] - tJ), out=tosc)
    bad = np.argwhere(np.triu(osc > tol_cauchy, k=1))
    bad_pairs = [(firsts[a], firsts[b]) for a, b in bad[:MAX_REPORTED_PAIRS]]
    bad_times = [firsts[a] for a in np.flatnonzero(tosc > tol_cauchy)[:MAX_REPORTED_PAIRS]]
    if len(bad) or bad_times:
        log.info("%d tuple pairs and %d tuples not Cauchy within %g", len(bad), len(bad_times),
                 tol_cauchy)

    # Quotient by glued distance on the last member.
    used = np.unique(np.concatenate([HJ.centers_at(i) for i in range(1, L + 1)]))
    adj = csr_matrix(XJ.dist[np.ix_(used, used)] <= delta_glue)
    _, labels = connected_components(adj, directed=False)
    first_of_point: dict[int, tuple[int, ...]] = {}
    for level_sigs, level_firsts in joint_levels([HJ]):
        for p, t in zip(level_sigs[:, 0].tolist(), level_firsts):
            if p not in first_of_point or t < first_of_point[p]:
                first_of_point[p] = t
    reps: dict[int, tuple[tuple[int, ...], int]] = {}
    for p, lab in zip(used.tolist(), labels.tolist()):
        cand = (first_of_point[p], p)
        if lab not in reps or cand < reps[lab]:
            reps[lab] = cand
    order = sorted(reps, key=lambda lab: reps[lab][0])
    new_id = {lab: c for c, lab in enumerate(order)}
    class_of_point = np.full(XJ.n, -1, dtype=int)
    class_of_point[used] = [new_id[lab] for lab in labels.tolist()]
    rep_tuples = tuple(reps[lab][0] for lab in order)
    rep_points = np.array([reps[lab][1] for lab in order], dtype=int)

    C = len(order)
    if class_distance == "representative":
        ldist = XJ.dist[np.ix_(rep_points, rep_points)].copy()
    else:
        ldist = np.zeros((C, C))
        groups = [np.flatnonzero(class_of_point == c) for c in range(C)]
        for a in range(C):
            for b in range(a + 1, C):
                ldist[a, b] = ldist[b, a] = XJ.dist[np.ix_(groups[a], groups[b])].max()
    ltime = XJ.time[rep_points].copy()

    spread = 0.0
    for c in range(C):
        g = np.flatnonzero(class_of_point == c)
        if len(g) > 1:
            spread = max(spread, float(XJ.dist[np.ix_(g, g)].max()))

    net_bad = []
    for level in range(1, L + 1):
        lc = np.unique(class_of_point[HJ.centers_at(level)])
        gap = ldist[lc].min(axis=0)
        for c in np.flatnonzero(gap > dyadic(level)):
            net_bad.append((level, int(c), float(gap[c] - dyadic(level))))

    check_tol = rounding_slack(D)
    try:
        limit_space = validate_space({
            "name": f"limit({family.spaces[-1].name})",
            "points": [str(Address(t)) for t in rep_tuples],
            "dist": ldist,
            "time": ltime,
            "tau_max": max(X.tau_max for X in family.spaces),
            "diameter_bound": max(D, float(ldist.max())),
        }, tol=check_tol)
    except InvalidSpaceError as exc:
        raise LimitSynthesisError(str(exc)) from exc

    diag = LimitDiagnostics(
        window=window,
        tol_cauchy=tol_cauchy,
        max_oscillation=float(max(osc.max(initial=0.0), tosc.max(initial=0.0))),
        max_time_oscillation=float(tosc.max(initial=0.0)),
        nonconvergent_pairs=bad_pairs,
        nonconvergent_count=int(len(bad)),
        nonconvergent_times=bad_times,
        glue_tolerance=float(delta_glue),
        max_class_spread=spread,
        net_violations=net_bad,
        diameter_excess=max(0.0, float(ldist.max()) - D),
    )
    return LimitSynthesis(family.plan, limit_space, rep_tuples, rep_points, class_of_point, HJ, diag)


class AddressGaps(NamedTuple):
    time: float
    dist: float
    vector: float


def _check_plan(family: EmbeddedFamily, limit: LimitSynthesis) -> None:
    if family.plan != limit.plan:
        raise ValueError(f"plan mismatch: {family.plan.sizes} vs {limit.plan.sizes}")


def _limit_rows(family: EmbeddedFamily, limit: LimitSynthesis, j: int):
    """Distinct (member-j center, limit class) pairs: deepest level and all levels."""
    pair = [family.hierarchies[j], limit.last]
    levels = joint_levels(pair)
    cls = limit.class_of_point

    def lift(rows):
        out = np.stack([rows[:, 0], cls[rows[:, 1]]], axis=1)
        return np.unique(out, axis=0)

    return lift(levels[-1][0]), lift(np.concatenate([s for s, _ in levels], axis=0))


def uniform_address_gap(family: EmbeddedFamily, limit: LimitSynthesis, j: int) -> AddressGaps:
    """Sups over depth-``L`` addresses of the member-``j`` vs limit discrepancy.

    ``time``: ``|tau_j(I^j(alpha)) - tau_inf(I^inf(alpha))|``;
    ``dist``: the distance discrepancy over address pairs;
    ``vector``: the full embedded-vector sup gap (time slot included when
    the family is timed).  ``j`` is the 0-based member position.
    """
    _check_plan(family, limit)
    X = family.spaces[j]
    addr, frame = _limit_rows(family, limit, j)
    p, c = addr[:, 0], addr[:, 1]
    lt, ld = limit.limit_time, limit.limit_dist
    tgap = np.abs(X.time[p] - lt[c])
    dgap = np.abs(X.dist[np.ix_(p, p)] - ld[np.ix_(c, c)])
    f, g = frame[:, 0], frame[:, 1]
    vgap = np.abs(X.dist[np.ix_(f, p)] - ld[np.ix_(g, c)]).max(axis=0)
    if family.timed:
        vgap = np.maximum(vgap, tgap)
    return AddressGaps(float(tgap.max()), float(dgap.max()), float(vgap.max()))


def limit_cloud(family: EmbeddedFamily, limit: LimitSynthesis, j: int
                ) -> tuple[np.ndarray, np.ndarray]:
    """Member-``j`` cloud and limit cloud on their shared distinct coordinates."""
    _check_plan(family, limit)
    _, frame = _limit_rows(family, limit, j)
    X = family.spaces[j]
    A = embed_cloud(X, frame[:, 0], family.timed)
    B = limit.limit_dist[:, frame[:, 1]]
    if family.timed:
        B = np.concatenate([limit.limit_time[:, None], B], axis=1)
    return A, B


def hausdorff_to_limit(family: EmbeddedFamily, limit: LimitSynthesis, j: int) -> float:
    """Sup-norm Hausdorff distance between member ``j`` and the limit."""
    return hausdorff_sup(*limit_cloud(family, limit, j))


def gap_sequences(family: EmbeddedFamily, limit: LimitSynthesis) -> dict[str, list[float]]:
    """Per-member gaps and Hausdorff distances to the limit, in family order."""
    out: dict[str, list[float]] = {"time": [], "dist": [], "vector": [], "hausdorff": []}
    for j in range(len(family)):
        g = uniform_address_gap(family, limit, j)
        out["time"].append(g.time)
        out["dist"].append(g.dist)
        out["vector"].append(g.vector)
        out["hausdorff"].append(hausdorff_to_limit(family, limit, j))
    return out


@dataclass(frozen=True, eq=False)
class ArzelaAscoliResult:
    limit_function: np.ndarray
    synthesis: LimitSynthesis
    family: EmbeddedFamily
    gaps: list[float]
    K: float


def arzela_ascoli(spaces: Sequence[FiniteTimedMetricSpace], functions: Sequence[Sequence[float]],
                  K: float, F_max: float | None = None, depth: int | None = None,
                  window: int = 3, tol_cauchy: float | None = None,
                  delta_glue: float | None = None, lip_tol: float = 0.0) -> ArzelaAscoliResult:
    """Limit of uniformly bounded ``K``-Lipschitz functions along a family.

    The functions become time functions ``tau_j = F_j / K``; the timed limit
    then gives ``F_inf = K tau_inf`` on the limit classes, and ``gaps[j]``
    is ``sup_alpha |F_j(I^j(alpha)) - F_inf(I^inf(alpha))|``.

    Raises:
        ValueError: a function is negative, exceeds ``F_max`` or is not
            ``K``-Lipschitz (beyond ``lip_tol``).
    """
    if K <= 0:
        raise ValueError("Lipschitz constant must be positive")
    if len(functions) != len(spaces):
        raise ValueError(f"{len(functions)} functions for {len(spaces)} spaces")
    Fs = [np.asarray(F, dtype=float) for F in functions]
    if F_max is None:
        F_max = max(float(F.max()) for F in Fs)
    timed = []
    for j, (X, F) in enumerate(zip(spaces, Fs)):
        if F.shape != (X.n,):
            raise ValueError(f"function {j} has {F.size} values for {X.n} points")
        if F.min() < 0 or F.max() > F_max:
            raise ValueError(f"function {j} leaves [0, {F_max}]")
        excess = np.abs(F[:, None] - F[None, :]) - K * X.dist
        slack = lip_tol + rounding_slack(K * X.diameter_bound)
        if excess.max() > slack:
            p, q = np.unravel_index(np.argmax(excess), excess.shape)
            raise ValueError(f"function {j} is not {K}-Lipschitz at points ({p}, {q})")
        timed.append(X.with_time(F / K, tau_max=F_max / K, tol=lip_tol / K))
    fam = embed_family(timed, depth, timed=True)
    lim = synthesize_limit(fam, window, tol_cauchy, delta_glue)
    gaps = [K * uniform_address_gap(fam, lim, j).time for j in range(len(fam))]
    return ArzelaAscoliResult(K * lim.limit_time, lim, fam, gaps, float(K))
