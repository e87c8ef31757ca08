"""Hierarchical dyadic nets with uniform product index sets.

Level ``i`` uses radius ``eps_i = 2**-i`` and the index grid
``A_i = [1..N_1] x ... x [1..N_i]``.  A level-``(i+1)`` tuple extends its
parent tuple by one coordinate.

Centers are chosen greedily (ascending point index, closed balls).  The
children of a level-``i`` center depend only on that center's point, so a
hierarchy is stored as one ``(n, N_{i+1})`` child table per level instead
of the full product grid; grid arrays are materialized only on request.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import prod
from typing import Any, Iterable, Sequence

import numpy as np

from .space import FiniteTimedMetricSpace

MAX_DEPTH = 20
MAX_GRID = 20_000_000


def dyadic(i: int) -> float:
    return 2.0 ** -i


@dataclass(frozen=True)
class LevelPlan:
    """Depth and per-level index-set sizes ``(N_1, ..., N_L)``."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if any(s < 1 for s in self.sizes):
            raise ValueError(f"level sizes must be positive: {self.sizes}")

    @property
    def depth(self) -> int:
        return len(self.sizes)

    @property
    def eps(self) -> tuple[float, ...]:
        return tuple(dyadic(i) for i in range(1, self.depth + 1))

    def grid_size(self, level: int | None = None) -> int:
        level = self.depth if level is None else level
        return prod(self.sizes[:level])

    def frame_length(self) -> int:
        return sum(self.grid_size(i) for i in range(1, self.depth + 1))

    def to_dict(self) -> dict[str, Any]:
        return {"depth": self.depth, "sizes": list(self.sizes)}


class PlanTooSmallError(ValueError):
    def __init__(self, level: int, parent: tuple[int, ...], needed: int, available: int):
        self.level, self.parent, self.needed, self.available = level, parent, needed, available
        where = f"under parent {parent}" if parent else "at the root"
        super().__init__(
            f"level {level} {where} needs {needed} centers, plan allows {available}"
        )


def greedy_cover(dist: np.ndarray, candidates: Sequence[int], radius: float) -> list[int]:
    """Greedy closed-ball cover of ``candidates``, scanned in the given order."""
    candidates = np.asarray(candidates, dtype=int)
    sub = dist[np.ix_(candidates, candidates)]
    covered = np.zeros(len(candidates), dtype=bool)
    chosen = []
    for k in range(len(candidates)):
        if not covered[k]:
            chosen.append(int(candidates[k]))
            covered |= sub[k] <= radius
    return chosen


def covering_number(X: FiniteTimedMetricSpace, R: float) -> int:
    """Size of the greedy closed ``R``-ball cover (an upper bound on the optimum)."""
    if R <= 0:
        raise ValueError("radius must be positive")
    return len(greedy_cover(X.dist, range(X.n), R))


def ball(X: FiniteTimedMetricSpace, center: int, radius: float) -> np.ndarray:
    return np.flatnonzero(X.dist[center] <= radius)


def _ragged(X: FiniteTimedMetricSpace, depth: int):
    """Unpadded greedy tree: level-1 centers plus per-level child lists."""
    if depth == 0:
        return [], []
    roots = greedy_cover(X.dist, range(X.n), dyadic(1))
    kids: list[dict[int, list[int]]] = []
    frontier = sorted(set(roots))
    for i in range(1, depth):
        table = {}
        for p in frontier:
            table[p] = greedy_cover(X.dist, ball(X, p, dyadic(i)), dyadic(i + 1))
        kids.append(table)
        frontier = sorted({c for cs in table.values() for c in cs})
    return roots, kids


def level_requirements(X: FiniteTimedMetricSpace, depth: int) -> tuple[int, ...]:
    """Per-level greedy sizes this space needs; the smallest plan it fits."""
    roots, kids = _ragged(X, depth)
    if depth == 0:
        return ()
    return (len(roots),) + tuple(max(len(c) for c in t.values()) for t in kids)


def default_depth(spaces: Iterable[FiniteTimedMetricSpace]) -> int:
    """Smallest ``i`` with ``eps_i`` below half the family's least positive distance."""
    mins = [m for m in (X.min_positive_distance() for X in spaces) if m is not None]
    if not mins:
        return 1
    target = min(mins) / 2
    i = 1
    while dyadic(i) >= target and i < MAX_DEPTH:
        i += 1
    return i


def plan_for_family(spaces: Sequence[FiniteTimedMetricSpace], depth: int | None = None) -> LevelPlan:
    """One plan that fits every space: ``N_i`` is the family maximum."""
    spaces = list(spaces)
    if not spaces:
        raise ValueError("empty family")
    if depth is None:
        depth = default_depth(spaces)
    reqs = [level_requirements(X, depth) for X in spaces]
    return LevelPlan(tuple(max(r[i] for r in reqs) for i in range(depth)))


@dataclass(frozen=True, eq=False)
class NetHierarchy:
    """Center maps ``I_i : A_i -> X`` for ``i = 1..L`` on one host space.

    ``roots[a_1 - 1]`` is the level-1 center of tuple ``(a_1,)``;
    ``children[i - 1][p, s]`` is the center of ``a + (s + 1,)`` whenever
    ``a`` is a level-``i`` tuple with center ``p``.  Rows for points that
    are never level-``i`` centers hold ``-1``.
    """

    plan: LevelPlan
    host: FiniteTimedMetricSpace
    roots: np.ndarray
    children: tuple[np.ndarray, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def depth(self) -> int:
        return self.plan.depth

    def center(self, a: Sequence[int]) -> int:
        """Center of a 1-based tuple ``a`` in ``A_len(a)``."""
        if not 1 <= len(a) <= self.depth:
            raise ValueError(f"tuple {tuple(a)} has no level in a depth-{self.depth} plan")
        for i, ai in enumerate(a):
            if not 1 <= ai <= self.plan.sizes[i]:
                raise ValueError(f"index {ai} out of range 1..{self.plan.sizes[i]} at level {i + 1}")
        p = int(self.roots[a[0] - 1])
        for i, ai in enumerate(a[1:], start=1):
            p = int(self.children[i - 1][p, ai - 1])
        return p

    def level_points(self, level: int) -> np.ndarray:
        """Grid array of shape ``(N_1, ..., N_level)`` holding ``I_level``."""
        size = self.plan.grid_size(level)
        if size > MAX_GRID:
            raise MemoryError(f"level {level} grid has {size} tuples")
        arr = np.asarray(self.roots)
        for i in range(1, level):
            arr = self.children[i - 1][arr]
        return arr

    def centers_at(self, level: int) -> np.ndarray:
        """Distinct points used as level-``level`` centers (sorted)."""
        key = ("centers", level)
        if key not in self._cache:
            pts = np.unique(self.roots)
            for i in range(1, level):
                pts = np.unique(self.children[i - 1][pts])
            self._cache[key] = pts
        return self._cache[key]

    def first_tuples(self, level: int) -> dict[int, tuple[int, ...]]:
        """Lexicographically first tuple reaching each level-``level`` center."""
        sigs, firsts = joint_levels([self], level)[level - 1]
        return {int(s[0]): t for s, t in zip(sigs, firsts)}

    @property
    def is_stable(self) -> bool:
        """True when every host point is a deepest-level center."""
        if self.depth == 0:
            return self.host.n == 1
        return len(self.centers_at(self.depth)) == self.host.n

    @property
    def resolution_radius(self) -> float:
        return 0.0 if self.is_stable else (dyadic(self.depth) if self.depth else float("inf"))

    def replace_center(self, a: Sequence[int], point: int) -> "NetHierarchy":
        """Copy with the center of tuple ``a`` moved to ``point``.

        Children are keyed by the parent's point, so every tuple sharing
        ``a``'s parent point and last index moves with it.
        """
        a = tuple(a)
        roots = np.array(self.roots)
        children = [np.array(c) for c in self.children]
        if len(a) == 1:
            roots[a[0] - 1] = point
        else:
            parent = self.center(a[:-1])
            children[len(a) - 2][parent, a[-1] - 1] = point
        for arr in [roots, *children]:
            arr.setflags(write=False)
        return NetHierarchy(self.plan, self.host, roots, tuple(children))

    def to_dict(self) -> dict[str, Any]:
        centers = {}
        for level in range(1, self.depth + 1):
            grid = self.level_points(level)
            centers[str(level)] = {
                ",".join(str(k + 1) for k in idx): int(grid[idx])
                for idx in np.ndindex(grid.shape)
            }
        return {"plan": self.plan.to_dict(), "centers": centers}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def hierarchy_from_dict(doc: dict[str, Any], host: FiniteTimedMetricSpace) -> NetHierarchy:
    """Rebuild from the serialized grid.

    The grid must be expressible with point-keyed child tables (true of
    everything :func:`build_hierarchy` produces); otherwise ``ValueError``.
    """
    plan = LevelPlan(tuple(doc["plan"]["sizes"]))
    if int(doc["plan"].get("depth", plan.depth)) != plan.depth:
        raise ValueError("plan depth disagrees with sizes")
    centers = {int(k): {tuple(int(x) for x in t.split(",")): int(p) for t, p in v.items()}
               for k, v in doc["centers"].items()}
    n = host.n
    if plan.depth == 0:
        return NetHierarchy(plan, host, np.zeros(0, dtype=int), ())
    roots = np.array([centers[1][(s + 1,)] for s in range(plan.sizes[0])], dtype=int)
    children = []
    for level in range(1, plan.depth):
        table = np.full((n, plan.sizes[level]), -1, dtype=int)
        for t, p in centers[level].items():
            for s in range(plan.sizes[level]):
                c = centers[level + 1][t + (s + 1,)]
                if table[p, s] not in (-1, c):
                    raise ValueError(f"children of point {p} at level {level} differ between tuples")
                table[p, s] = c
        children.append(table)
    for arr in [roots, *children]:
        arr.setflags(write=False)
    return NetHierarchy(plan, host, roots, tuple(children))


def build_hierarchy(X: FiniteTimedMetricSpace, plan: LevelPlan) -> NetHierarchy:
    """Greedy nested nets on ``X`` padded to the plan's product grid.

    Short child lists are padded by repeating the first child.

    Raises:
        PlanTooSmallError: naming the first level and parent tuple whose
            greedy cover needs more centers than the plan allows.
    """
    roots, kids = _ragged(X, plan.depth)
    if plan.depth == 0:
        return NetHierarchy(plan, X, np.zeros(0, dtype=int), ())
    if len(roots) > plan.sizes[0]:
        raise PlanTooSmallError(1, (), len(roots), plan.sizes[0])
    root_arr = np.array(roots + [roots[0]] * (plan.sizes[0] - len(roots)), dtype=int)
    root_arr.setflags(write=False)
    tables = []
    for i, table in enumerate(kids, start=1):
        width = plan.sizes[i]
        arr = np.full((X.n, width), -1, dtype=int)
        for p, cs in table.items():
            if len(cs) > width:
                partial = NetHierarchy(LevelPlan(plan.sizes[:i]), X, root_arr, tuple(tables))
                parent = partial.first_tuples(i)[p]
                raise PlanTooSmallError(i + 1, parent, len(cs), width)
            arr[p] = cs + [cs[0]] * (width - len(cs))
        arr.setflags(write=False)
        tables.append(arr)
    return NetHierarchy(plan, X, root_arr, tuple(tables))


def build_family(spaces: Sequence[FiniteTimedMetricSpace], depth: int | None = None
                 ) -> tuple[LevelPlan, list[NetHierarchy]]:
    plan = plan_for_family(spaces, depth)
    return plan, [build_hierarchy(X, plan) for X in spaces]


def joint_levels(hierarchies: Sequence[NetHierarchy], upto: int | None = None
                 ) -> list[tuple[np.ndarray, list[tuple[int, ...]]]]:
    """Distinct joint centers per level across hierarchies sharing a plan.

    For level ``i`` returns ``(sigs, firsts)``: ``sigs`` has one row per
    distinct vector ``(I^1_i(a), ..., I^m_i(a))`` over ``a`` in ``A_i``, and
    ``firsts`` the lexicographically first tuple producing each row.  Rows
    are ordered by that tuple.  Cost is linear in the number of distinct
    rows, not in the grid size.
    """
    plan = hierarchies[0].plan
    if any(h.plan != plan for h in hierarchies):
        raise ValueError("hierarchies do not share a plan")
    upto = plan.depth if upto is None else upto
    out = []
    if upto == 0:
        return out
    rows = np.stack([h.roots for h in hierarchies], axis=1)
    parents: list[tuple[int, ...]] = [()]
    width = plan.sizes[0]
    for level in range(1, upto + 1):
        if level > 1:
            width = plan.sizes[level - 1]
            prev_sigs = out[-1][0]
            rows = np.stack(
                [h.children[level - 2][prev_sigs[:, k]] for k, h in enumerate(hierarchies)],
                axis=2,
            ).reshape(-1, len(hierarchies))
            parents = out[-1][1]
        if np.any(rows < 0):
            raise ValueError(f"hierarchy has undefined centers at level {level}")
        sigs, first = np.unique(rows, axis=0, return_index=True)
        order = np.argsort(first)
        sigs, first = sigs[order], first[order]
        firsts = [parents[f // width] + (int(f % width) + 1,) for f in first]
        out.append((sigs, firsts))
    return out


@dataclass(frozen=True)
class Violation:
    kind: str  # "cover", "parent", "refine" or "structure"
    level: int
    tuple: tuple[int, ...]
    witness: int
    excess: float

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "level": self.level, "tuple": list(self.tuple),
                "witness": self.witness, "excess": self.excess}


def verify_hierarchy(H: NetHierarchy) -> list[Violation]:
    """Every covering, parent-proximity and refinement failure (closed balls).

    An empty list means all three invariants hold at every level.
    """
    X, d = H.host, H.host.dist
    out: list[Violation] = []
    if H.depth == 0:
        return out
    if np.any((H.roots < 0) | (H.roots >= X.n)):
        return [Violation("structure", 1, (), -1, 0.0)]
    frontier = {int(p): (s + 1,) for s, p in reversed(list(enumerate(H.roots)))}
    for level in range(1, H.depth + 1):
        eps = dyadic(level)
        cs = np.array(sorted(frontier))
        gap = d[:, cs].min(axis=1)
        for x in np.flatnonzero(gap > eps):
            out.append(Violation("cover", level, (), int(x), float(gap[x] - eps)))
        if level == H.depth:
            break
        table = H.children[level - 1]
        nxt: dict[int, tuple[int, ...]] = {}
        for p in cs:
            t = frontier[int(p)]
            kids = table[p]
            if np.any((kids < 0) | (kids >= X.n)):
                out.append(Violation("structure", level + 1, t, int(p), 0.0))
                kids = kids[(kids >= 0) & (kids < X.n)]
                if kids.size == 0:
                    continue
            for s, c in enumerate(table[p]):
                if 0 <= c < X.n:
                    if d[p, c] > 2 * eps:
                        out.append(Violation("parent", level + 1, t + (s + 1,), int(c),
                                             float(d[p, c] - 2 * eps)))
                    child_t = t + (s + 1,)
                    if int(c) not in nxt or child_t < nxt[int(c)]:
                        nxt[int(c)] = child_t
            inside = ball(X, int(p), eps)
            reach = d[np.ix_(inside, kids)].min(axis=1)
            for x, r in zip(inside, reach):
                if r > dyadic(level + 1):
                    out.append(Violation("refine", level + 1, t, int(x),
                                         float(r - dyadic(level + 1))))
        frontier = nxt
    return out
