"""Computable chain or leaf antichain in a stagewise tree."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import Undetermined
from ..trees import FiniteTree, StagewiseTree


@dataclass(frozen=True)
class Chain:
    nodes: tuple[int, ...]

    def verify(self, t: FiniteTree) -> bool:
        xs = self.nodes
        return all(t.is_leq(a, b) and a != b for a, b in zip(xs, xs[1:]))


@dataclass(frozen=True)
class Antichain:
    nodes: tuple[int, ...]

    def verify(self, t: FiniteTree) -> bool:
        xs = sorted(self.nodes, key=lambda n: t.interval(n)[0])
        # sorted by entry time, an antichain has disjoint consecutive intervals
        return len(set(xs)) == len(xs) and all(
            t.interval(b)[0] >= t.interval(a)[1] for a, b in zip(xs, xs[1:]))


def stable_leaves(p: StagewiseTree, horizon: int, margin: int) -> list[int]:
    """Leaves at the horizon that were already present ``margin`` stages earlier."""
    t = p.freeze(horizon)
    return sorted(x for x in t.leaves() if p.stage_of(x) <= horizon - margin)


def _leafless_infinite(p: StagewiseTree, t: FiniteTree, horizon: int, margin: int,
                       leaves: set[int]) -> Optional[int]:
    """Least node whose subtree holds no stable leaf and still grows near the horizon.

    Declared infinite nodes are preferred when the presentation carries them.
    """
    recent = {x for x in t.nodes if p.stage_of(x) > horizon - margin}
    has_leaf: dict[int, bool] = {}
    grows: dict[int, bool] = {}
    for x in reversed(t.preorder()):
        kids = t.successors(x)
        has_leaf[x] = x in leaves or any(has_leaf[c] for c in kids)
        grows[x] = x in recent or any(grows[c] for c in kids)
    pool = [x for x in t.nodes if not has_leaf[x] and grows[x]]
    md = p.metadata
    declared = [x for x in pool if md is not None and md.infinite(x)]
    pick = declared or pool
    return min(pick) if pick else None


def chain_or_antichain(p: StagewiseTree, target_size: int, horizon: Optional[int] = None,
                       margin: Optional[int] = None):
    """A leaf antichain of ``target_size`` if enough stable leaves exist, else a greedy chain.

    The chain starts at a leafless node that keeps growing and repeatedly
    takes the least id strictly above the current node.
    """
    horizon = p.horizon if horizon is None else horizon
    margin = max(1, horizon // 10) if margin is None else margin
    t = p.freeze(horizon)
    if len(t) < target_size:
        raise Undetermined(f"the frozen tree has only {len(t)} nodes")
    leaves = stable_leaves(p, horizon, margin)
    if len(leaves) >= target_size:
        return Antichain(tuple(leaves[:target_size]))
    x = _leafless_infinite(p, t, horizon, margin, set(leaves))
    if x is None:
        raise Undetermined(f"{len(leaves)} stable leaves and no leafless growing node")
    chain = [x]
    while len(chain) < target_size:
        above = [y for y in t.descendants(chain[-1]) if y != chain[-1]]
        if not above:
            raise Undetermined(f"greedy chain stops after {len(chain)} nodes")
        chain.append(min(above))
    return Chain(tuple(chain))
