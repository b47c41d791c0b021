"""Independent brute-force oracles used to derive and cross-check expected values."""

from __future__ import annotations

from itertools import permutations

from artifact.trees import FiniteTree


def embeddings_exist(a: FiniteTree, b: FiniteTree) -> bool:
    """Backtracking over injective maps with pairwise order checks."""
    src = sorted(a.nodes)
    dst = sorted(b.nodes)
    if len(src) > len(dst):
        return False
    assign: dict[int, int] = {}
    used: set[int] = set()

    def ok(n: int, v: int) -> bool:
        for m, w in assign.items():
            if a.is_leq(n, m) != b.is_leq(v, w) or a.is_leq(m, n) != b.is_leq(w, v):
                return False
        return True

    def go(i: int) -> bool:
        if i == len(src):
            return True
        n = src[i]
        for v in dst:
            if v in used or not ok(n, v):
                continue
            assign[n] = v
            used.add(v)
            if go(i + 1):
                return True
            del assign[n]
            used.discard(v)
        return False

    return go(0)


def all_self_embeddings(t: FiniteTree):
    """Every order-preserving-and-reflecting injection of a tree into itself."""
    nodes = sorted(t.nodes)
    for perm in permutations(nodes):
        m = dict(zip(nodes, perm))
        if all(t.is_leq(x, y) == t.is_leq(m[x], m[y]) for x in nodes for y in nodes):
            yield m


def is_valid_embedding(a: FiniteTree, b: FiniteTree, m: dict[int, int]) -> bool:
    if set(m) != set(a.nodes) or len(set(m.values())) != len(m):
        return False
    if any(v not in b for v in m.values()):
        return False
    return all(a.is_leq(x, y) == b.is_leq(m[x], m[y]) for x in a.nodes for y in a.nodes)


def count_self_embeddings(t: FiniteTree, stop_after: int = 2) -> int:
    """Count injective self-maps preserving and reflecting order, by backtracking."""
    nodes = list(t.preorder())
    assign: dict[int, int] = {}
    used: set[int] = set()
    found = 0

    def go(i: int) -> bool:
        nonlocal found
        if i == len(nodes):
            found += 1
            return found >= stop_after
        n = nodes[i]
        for v in nodes:
            if v in used:
                continue
            if all(t.is_leq(n, m) == t.is_leq(v, w) and t.is_leq(m, n) == t.is_leq(w, v)
                   for m, w in assign.items()):
                assign[n] = v
                used.add(v)
                if go(i + 1):
                    return True
                del assign[n]
                used.discard(v)
        return False

    go(0)
    return found


def automorphism_count(t: FiniteTree) -> int:
    """|Aut(T)| from canonical forms: product of factorials of repeated child shapes.

    A self-embedding of a finite tree is a bijection preserving and reflecting
    order, so it is an automorphism; this counts them without search.
    """
    from collections import Counter
    from math import factorial

    forms: dict[int, tuple] = {}
    total = 1
    for n in reversed(t.preorder()):
        kids = [forms[c] for c in t.successors(n)]
        forms[n] = tuple(sorted(kids))
        for mult in Counter(kids).values():
            total *= factorial(mult)
    return total


def schedule_of(family, horizon: int) -> list:
    """who[s] for s = 0..horizon, read through the public ``who`` query."""
    return [family.who(s) for s in range(horizon + 1)]


def f_direct(who: list, n: int, s: int) -> int:
    """The three-case guess f(n,s) evaluated straight from an event list."""
    def last(j, upto):
        hits = [t for t in range(1, upto + 1) if who[t] == j]
        return hits[-1] if hits else None

    lasts = [last(j, s) for j in range(n + 1)]
    if all(x is None for x in lasts):
        return 0
    i = who[s]
    if i is None or i > n:
        return max(x for x in lasts if x is not None)
    t = last(i, s - 1) or 0
    inside = {j for j in range(n + 1) if lasts[j] is not None and lasts[j] > t}
    if len(inside) == n + 1:
        return 0
    return max((lasts[j] for j in range(n + 1) if j not in inside and lasts[j] is not None), default=0)
