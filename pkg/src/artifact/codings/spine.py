"""Gluing components onto an infinite spine, and stripping the spine off again."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..embedding import Embedding
from ..errors import ComponentTooTall
from ..trees import FiniteTree

MAX_COMPONENT_HEIGHT = 3
PATH_CHAIN = 4


@dataclass
class Glued:
    tree: FiniteTree
    spine: list[int]  # a_0, a_1, …
    component_roots: list[int]  # lambda_i, attached at a_i
    source_root: int  # root of the tree the components came from


def glue_spine(t: FiniteTree, extra: int = PATH_CHAIN + 1) -> Glued:
    """Replace the root by a spine a_0 < a_1 < … with component i hanging from a_i.

    ``extra`` spine nodes are added past the last component so the
    chain-of-height-4 path test still sees every a_i that carries one.
    """
    roots = list(t.successors(t.root))
    for r in roots:
        if t.subtree_height(r) > MAX_COMPONENT_HEIGHT:
            raise ComponentTooTall(f"component {r} has height {t.subtree_height(r)}")
    base = max(t.nodes) + 1
    spine = [base + i for i in range(len(roots) + extra)]
    pm: dict[int, Optional[int]] = {}
    for i, a in enumerate(spine):
        pm[a] = spine[i - 1] if i else None
    for i, r in enumerate(roots):
        for x in t.descendants(r):
            pm[x] = t.parent(x) if x != r else spine[i]
    return Glued(FiniteTree(pm), spine, roots, t.root)


def detect_path(u: FiniteTree) -> set[int]:
    """Nodes with a chain of height 4 above them."""
    return {x for x in u.nodes if u.subtree_height(x) >= PATH_CHAIN}


def strip_path(u: FiniteTree, b, rho: Optional[int] = None) -> tuple[FiniteTree, int]:
    """V = (U minus B) plus a fresh root rho below everything."""
    b = set(b)
    rho = max(u.nodes) + 1 if rho is None else rho
    pm: dict[int, Optional[int]] = {rho: None}
    for x in u.nodes:
        if x in b:
            continue
        p = u.parent(x)
        pm[x] = rho if p is None or p in b else p
    return FiniteTree(pm), rho


def induce_component_embedding(delta: Embedding, path, source_root: int,
                               target: Optional[FiniteTree] = None) -> Embedding:
    """delta' fixes the old root and agrees with delta off the path.

    ``target`` is the tree with the spine removed (defaults to stripping the
    source of ``delta`` with the old root as the fresh node).
    """
    path = set(path)
    bad = sorted(x for x, y in delta.map.items() if x not in path and y in path)
    if bad:
        raise ValueError(f"delta sends off-path nodes {bad[:5]} onto the path")
    if target is None:
        target, _ = strip_path(delta.target, path, rho=source_root)
    out = {source_root: source_root}
    for x, y in delta.map.items():
        if x not in path:
            out[x] = y
    domain = [x for x in out if x in target]
    src = target.induced(domain)
    return Embedding(src, target, {x: out[x] for x in domain})
