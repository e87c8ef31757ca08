"""Addresses: compatible index chains naming points across a family.

An address of depth ``L`` is a chain ``(a_1,), (a_1, a_2), ..., (a_1..a_L)``;
since each entry extends the previous one, it is stored as its deepest
tuple.  Text form is ``"a1.a2.....aL"`` with 1-based indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterator, Sequence

import numpy as np

from .nets import LevelPlan, NetHierarchy, dyadic


class IncompatibleAddressError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Address:
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(a) for a in self.indices))

    @classmethod
    def from_chain(cls, chain: Sequence[Sequence[int]]) -> "Address":
        """Build from ``(alpha_1, ..., alpha_L)``, checking ``p_i(alpha_{i+1}) = alpha_i``."""
        chain = [tuple(c) for c in chain]
        for i, c in enumerate(chain, start=1):
            if len(c) != i:
                raise IncompatibleAddressError(f"alpha_{i} = {c} is not a level-{i} tuple")
            if i > 1 and c[:-1] != chain[i - 2]:
                raise IncompatibleAddressError(f"alpha_{i} = {c} does not extend {chain[i - 2]}")
        return cls(chain[-1] if chain else ())

    @classmethod
    def parse(cls, text: str) -> "Address":
        text = text.strip()
        return cls(tuple(int(t) for t in text.split("."))) if text else cls(())

    @property
    def depth(self) -> int:
        return len(self.indices)

    @property
    def chain(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.indices[:i] for i in range(1, self.depth + 1))

    def truncate(self, i: int) -> tuple[int, ...]:
        """``q_i(alpha)``, the level-``i`` tuple."""
        return self.indices[:i]

    def check(self, plan: LevelPlan) -> None:
        if self.depth > plan.depth:
            raise IncompatibleAddressError(f"address {self} deeper than plan depth {plan.depth}")
        for i, (a, n) in enumerate(zip(self.indices, plan.sizes), start=1):
            if not 1 <= a <= n:
                raise IncompatibleAddressError(f"index {a} at level {i} outside 1..{n}")

    def __str__(self) -> str:
        return ".".join(str(a) for a in self.indices)


def resolve_with_radius(H: NetHierarchy, alpha: Address) -> tuple[int, float]:
    """Point named by ``alpha`` and the radius it is known to within.

    The radius is 0 when ``alpha`` reaches the plan depth of a stable
    hierarchy, else ``eps_k`` for the deepest level ``k`` that was used.
    """
    alpha.check(H.plan)
    if alpha.depth == 0:
        raise IncompatibleAddressError("empty address")
    p = H.center(alpha.indices)
    exact = alpha.depth == H.depth and H.is_stable
    return p, 0.0 if exact else dyadic(alpha.depth)


def resolve(H: NetHierarchy, alpha: Address) -> int:
    """``I_L(alpha_L)``: the deepest center along the chain."""
    return resolve_with_radius(H, alpha)[0]


def address_of(H: NetHierarchy, x: int) -> Address:
    """Lexicographically first address with ``x`` in every closed chain ball.

    Chains ending exactly at ``x`` are preferred, so on a stable hierarchy
    ``resolve(H, address_of(H, x)) == x``.
    """
    X = H.host
    if not 0 <= x < X.n:
        raise IndexError(f"point {x} not in space of size {X.n}")
    if H.depth == 0:
        return Address(())
    d = X.dist[x]

    def search(exact: bool) -> tuple[int, ...] | None:
        dead: set[tuple[int, int]] = set()

        def walk(level: int, p: int, prefix: tuple[int, ...]):
            if d[p] > dyadic(level):
                return None
            if level == H.depth:
                return prefix if (p == x or not exact) else None
            if (level, p) in dead:
                return None
            seen = set()
            for s, c in enumerate(H.children[level - 1][p]):
                c = int(c)
                if c in seen:
                    continue
                seen.add(c)
                found = walk(level + 1, c, prefix + (s + 1,))
                if found is not None:
                    return found
            dead.add((level, p))
            return None

        seen_roots = set()
        for s, r in enumerate(H.roots):
            r = int(r)
            if r in seen_roots:
                continue
            seen_roots.add(r)
            found = walk(1, r, (s + 1,))
            if found is not None:
                return found
        return None

    found = search(exact=True) or search(exact=False)
    if found is None:
        raise ValueError(f"point {x} is not covered by the hierarchy")
    return Address(found)


def shared_addresses(plan: LevelPlan) -> Iterator[Address]:
    """Lazily enumerate every depth-``L`` address in lexicographic order."""
    for t in itertools.product(*(range(1, n + 1) for n in plan.sizes)):
        yield Address(t)


def address_count(plan: LevelPlan) -> int:
    return prod(plan.sizes)


def chain_pairs(H: NetHierarchy, i: int, k: int) -> np.ndarray:
    """Distinct pairs ``(I_i(alpha_i), I_k(alpha_k))`` over all addresses.

    Rows are found by propagating through the child tables, so the cost
    does not depend on the grid size.
    """
    if not 1 <= i <= k <= H.depth:
        raise ValueError("need 1 <= i <= k <= depth")
    start = H.centers_at(i)
    pairs = np.stack([start, start], axis=1)
    for level in range(i, k):
        kids = H.children[level - 1][pairs[:, 1]]
        anc = np.repeat(pairs[:, 0], kids.shape[1])
        pairs = np.unique(np.stack([anc, kids.ravel()], axis=1), axis=0)
    return pairs
