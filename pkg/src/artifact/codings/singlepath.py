"""Single-path tree whose only path codes K, and its weak-nontriviality hardening.

Node s+1 is attached at stage s to n_s, the deepest node below s whose
height-prefix of K did not change at s+1.  The successor relation is
computable because nodes only ever arrive as leaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import HorizonTooSmall
from ..oracles import MockCeSet
from ..trees import FiniteTree, GroundTruth, StagewiseTree


def _least_entering(k: MockCeSet, t: int) -> Optional[int]:
    xs = k.entering_at(t)
    return min(xs) if xs else None


def attach_point(parent: dict[int, Optional[int]], depth: dict[int, int], s: int,
                 k: MockCeSet) -> int:
    """n_s: deepest m below s with K_{s+1}[ht m] = K_s[ht m]."""
    x = _least_entering(k, s + 1)
    m = s
    if x is None:
        return m
    while depth[m] > x:
        m = parent[m]
    return m


@dataclass
class SinglePathResult:
    tree: StagewiseTree
    attach: list[int]  # attach[s] = n_s
    k: MockCeSet


def singlepath_build(k: MockCeSet, horizon: int) -> SinglePathResult:
    if any(t > horizon for _, t in k.events):
        raise HorizonTooSmall("K has events beyond the horizon")
    p = StagewiseTree()
    p.add(0, None)
    parent: dict[int, Optional[int]] = {0: None}
    depth = {0: 0}
    attach: list[int] = []
    for s in range(horizon):
        n_s = attach_point(parent, depth, s, k)
        attach.append(n_s)
        p.new_stage()
        p.add(s + 1, n_s)
        parent[s + 1] = n_s
        depth[s + 1] = depth[n_s] + 1
    path = tuple(path_extract(p.freeze()))
    p.metadata = GroundTruth(tree_type=2, isolated_path=path, infinite_nodes=frozenset(path))
    return SinglePathResult(p, attach, k)


def path_extract(t: FiniteTree) -> list[int]:
    """x_n = max{m : ht(m) <= n} for every n up to the height of the newest node.

    Nodes arrive as leaves in increasing order, so the newest node is the
    current guess at the path's top.
    """
    newest = max(t.nodes)
    top = t.height(newest)
    best: dict[int, int] = {}
    for m in t.nodes:
        h = t.height(m)
        if h <= top and m > best.get(h, -1):
            best[h] = m
    xs = []
    cur = -1
    for n in range(top + 1):
        cur = max(cur, best.get(n, -1))
        xs.append(cur)
    return xs


def path_by_successors(t: FiniteTree, start: Optional[int] = None) -> list[int]:
    """Walk the path with the computable successor relation: always follow the newest branch."""
    x = t.root if start is None else start
    newest = max(t.nodes)
    on = set(t.ancestors(newest))
    out = [x]
    while True:
        nxt = [c for c in t.successors(x) if c in on]
        if not nxt:
            return out
        x = nxt[0]
        out.append(x)


def tech_conditions(t: FiniteTree) -> dict[str, bool]:
    """Finitely (indeed binary) branching, order refines numeric order, and c)."""
    nodes = sorted(t.nodes)
    a = all(t.branching(n) <= 2 for n in nodes)
    b = all(t.parent(n) is None or t.parent(n) < n for n in nodes)
    c = all(t.is_leq(t.parent(n + 1), n) for n in nodes if n + 1 in t)
    return {"a": a, "b": b, "c": c}


def singlepath_decode(res: SinglePathResult, n_max: int) -> list[frozenset[int]]:
    """K_{x_n}[n] for n <= n_max, read along the extracted path."""
    p = res.tree
    t = p.freeze()
    if any(tt > p.horizon for _, tt in res.k.events):
        raise HorizonTooSmall("K changes after the horizon")
    xs = path_extract(t)
    if len(xs) <= n_max:
        raise HorizonTooSmall(f"path reaches height {len(xs) - 1} < {n_max}")
    return [frozenset(x for x, tt in res.k.events if tt <= xs[n] and x < n) for n in range(n_max + 1)]


# ---------------------------------------------------------------------------
# hardening


@dataclass
class HardenedResult:
    tree: StagewiseTree
    even_attach: list[int]
    extended: dict[int, int] = field(default_factory=dict)  # leaf -> times extended


def harden_weak(k: MockCeSet, horizon: int) -> HardenedResult:
    """Build the even-id copy and extend off-guess leaves to pairwise distinct heights.

    At stage s, every leaf above 2n_s other than 2(s+1) is lengthened by odd
    ids: each at least once, to the least heights that are pairwise distinct.
    """
    base = singlepath_build(k, horizon)
    p = StagewiseTree()
    p.add(0, None)
    parent: dict[int, Optional[int]] = {0: None}
    children: dict[int, list[int]] = {0: []}
    depth = {0: 0}
    next_odd = 1
    extended: dict[int, int] = {}

    def add(x: int, par: int) -> None:
        p.add(x, par)
        parent[x] = par
        children[x] = []
        children[par].append(x)
        depth[x] = depth[par] + 1

    for s, n_s in enumerate(base.attach):
        p.new_stage()
        root = 2 * n_s
        new = 2 * (s + 1)
        add(new, root)
        leaves = []
        stack = [root]
        while stack:
            y = stack.pop()
            if children[y]:
                stack.extend(children[y])
            elif y != new:
                leaves.append(y)
        leaves.sort(key=lambda y: (depth[y], y))
        prev = -1
        for leaf in leaves:
            target = max(depth[leaf] + 1, prev + 1)
            cur = leaf
            while depth[cur] < target:
                add(next_odd, cur)
                cur = next_odd
                next_odd += 2
            extended[leaf] = extended.get(leaf, 0) + 1
            prev = target
    t = p.freeze()
    evens = [x for x in t.nodes if x % 2 == 0]
    newest = max(evens)
    path = tuple(x for x in t.ancestors(newest))
    p.metadata = GroundTruth(tree_type=2, isolated_path=path, infinite_nodes=frozenset(path))
    return HardenedResult(p, [2 * n for n in base.attach], extended)


def just_off_nodes(t: FiniteTree, path) -> list[int]:
    on = set(path)
    return sorted(c for x in path for c in t.successors(x) if c not in on)


def hardened_path(t: FiniteTree) -> list[int]:
    """x'_n: the greatest even id of height <= n, for n up to the newest even's height."""
    evens = [x for x in t.nodes if x % 2 == 0]
    top = t.height(max(evens))
    best: dict[int, int] = {}
    for m in evens:
        h = t.height(m)
        if m > best.get(h, -1):
            best[h] = m
    out, cur = [], -1
    for n in range(top + 1):
        cur = max(cur, best.get(n, -1))
        out.append(cur)
    return out
