"""Self-embedding synthesis relative to limit oracles.

Type 1: shift the finite successor trees of the maximal infinite node into
fresh later ones.  Type 2: walk the isolated path, then shift the finite
slabs between consecutive path nodes.  Type 3 lives in ``type3_embed``.

All searches that would run forever against a true oracle are bounded by
the frozen tree and fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..embedding import Embedding, NotFound, find_embedding, kruskal_index, Inconsistent
from ..errors import HorizonTooSmall, OracleFailure
from ..oracles import LimitOracle
from ..trees import FiniteTree, StagewiseTree


@dataclass
class Synthesis:
    embedding: Embedding
    fixed_prefix: int  # the Kruskal index used
    targets: dict[int, int]  # component root -> image root


def _component_trees(t: FiniteTree, roots: Sequence[int]) -> list[FiniteTree]:
    return [t.subtree(r) for r in roots]


def shift_components(t: FiniteTree, roots: Sequence[int], k: int,
                     root_pin: bool = False) -> tuple[dict[int, int], dict[int, int]]:
    """Map component j >= k into the least fresh later component it embeds into.

    Returns (node map on the shifted components, component-root targets).
    Stops at the first component with no target inside the frozen tree.
    With ``root_pin`` each component root must land on the target root.
    """
    comps = _component_trees(t, roots)
    mapping: dict[int, int] = {}
    targets: dict[int, int] = {}
    high = max(roots[:k], default=0)
    for j in range(k, len(roots)):
        found = None
        for tt in range(j + 1, len(roots)):
            if roots[tt] <= high + 1:
                continue
            a, b = comps[j], comps[tt]
            if a.ht() > b.ht() or len(a) > len(b) or a.subtree_leaves(a.root) > b.subtree_leaves(b.root):
                continue
            fixed = {roots[j]: roots[tt]} if root_pin else None
            w = find_embedding(comps[j], comps[tt], fixed)
            if w is not NotFound:
                found = (tt, w)
                break
        if found is None:
            break
        tt, w = found
        mapping.update(w.map)
        targets[roots[j]] = roots[tt]
        high = max(high, roots[tt])
    return mapping, targets


def _successor_list(oracle, n) -> list[int]:
    return sorted(oracle.successors(n))


def synthesize_type1(p: StagewiseTree, oracle, k: Optional[int] = None,
                     n: Optional[int] = None, exclude: Sequence[int] = ()) -> Synthesis:
    """Nontrivial self-embedding of a type 1 presentation, restricted to the frozen tree.

    ``n`` is the maximal infinite node (read from a full oracle when omitted).
    Components are the successor trees of ``n`` minus ``exclude``.  The
    result's source is the part of the frozen tree on which the map is
    defined.
    """
    t = p.freeze()
    if n is None:
        if not isinstance(oracle, LimitOracle) or oracle.md.maximal_infinite is None:
            raise OracleFailure("the oracle does not name a maximal infinite node")
        n = oracle.md.maximal_infinite
    roots = [r for r in _successor_list(oracle, n) if r not in set(exclude)]
    if k is None:
        comps = _component_trees(t, roots)
        got = kruskal_index(comps, len(comps))
        if got is Inconsistent:
            raise HorizonTooSmall("no Kruskal index is consistent with the frozen components")
        k = got
    mapping, targets = shift_components(t, roots, k)
    if not targets:
        raise HorizonTooSmall("no fresh target found for the first shifted component")
    domain = set(t.nodes)
    for r in roots[k:]:
        if r not in targets:
            domain.difference_update(t.descendants(r))
    full = {x: mapping.get(x, x) for x in domain}
    src = t.induced(domain)
    return Synthesis(Embedding(src, t, full), k, targets)


def spine_from_oracle(p: StagewiseTree, oracle: LimitOracle, start=None) -> list[int]:
    """x_0 < x_1 < … along the unique infinite successor, as far as the frozen tree reaches."""
    t = p.freeze()
    md = oracle.md
    x = start if start is not None else (md.isolated_path[0] if md.isolated_path else t.root)
    out = [x]
    while True:
        nxt = [c for c in oracle.successors(x) if oracle.is_subtree_infinite(c)]
        if not nxt:
            return out
        if len(nxt) > 1:
            raise OracleFailure(f"node {x} has several infinite successors")
        x = nxt[0]
        out.append(x)


def synthesize_type2(p: StagewiseTree, oracle: LimitOracle, margin: int = 0,
                     k: Optional[int] = None) -> Synthesis:
    """Shift the slabs T(x_i) minus T(x_{i+1}) forward along the isolated path.

    Only slabs that gained no node during the last ``margin`` stages count as
    settled.  An omega-node on the path is delegated to the type 1 routine.
    """
    t = p.freeze()
    spine = spine_from_oracle(p, oracle)
    for x in spine:
        if oracle.is_omega_node(x):
            inf = [c for c in oracle.successors(x) if oracle.is_subtree_infinite(c)]
            later = [c for c in _successor_list(oracle, x) if not inf or c > inf[0]]
            skip = [c for c in _successor_list(oracle, x) if c not in later]
            return synthesize_type1(p, oracle, k=k, n=x, exclude=skip)
    cut = p.horizon - margin
    slabs: list[list[int]] = []
    for i, x in enumerate(spine[:-1]):
        nodes = [x]
        for c in t.successors(x):
            if c != spine[i + 1]:
                nodes.extend(t.descendants(c))
        if any(p.stage_of(m) > cut for m in nodes if m != x):
            break
        if p.stage_of(spine[i + 1]) > cut:
            break
        slabs.append(nodes)
    roots = [s[0] for s in slabs]
    if len(roots) < 2:
        raise HorizonTooSmall("fewer than two settled slabs")
    slab_trees = [t.induced(s) for s in slabs]
    if k is None:
        got = kruskal_index(slab_trees, len(slab_trees), embeds_fn=_rooted_embeds)
        if got is Inconsistent:
            raise HorizonTooSmall("no Kruskal index is consistent with the settled slabs")
        k = got
    mapping: dict[int, int] = {}
    targets: dict[int, int] = {}
    last_t = k - 1
    for j in range(k, len(roots)):
        hit = None
        for tt in range(max(j + 1, last_t + 1), len(roots)):
            w = find_embedding(slab_trees[j], slab_trees[tt], {roots[j]: roots[tt]})
            if w is not NotFound:
                hit = (tt, w)
                break
        if hit is None:
            break
        tt, w = hit
        mapping.update(w.map)
        targets[roots[j]] = roots[tt]
        last_t = tt
    if not targets:
        raise HorizonTooSmall("no slab found a later target")
    first_unmapped = next((r for r in roots[k:] if r not in targets), None)
    domain = set(t.nodes)
    if first_unmapped is not None:
        domain.difference_update(t.descendants(first_unmapped))
    else:
        domain.difference_update(t.descendants(spine[len(roots)]) if len(roots) < len(spine) else ())
    full = {x: mapping.get(x, x) for x in domain}
    return Synthesis(Embedding(t.induced(domain), t, full), k, targets)


def _rooted_embeds(a: FiniteTree, b: FiniteTree) -> bool:
    return find_embedding(a, b, {a.root: b.root}) is not NotFound
