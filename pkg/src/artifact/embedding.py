"""Order embeddings between finite trees.

An embedding is an injective map that both preserves and reflects the tree
order.  Roots, meets and levels need not be preserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

from .errors import EscapesHorizon, OracleFailure, PartialMap
from .trees import FiniteTree, StagewiseTree


class _NotFound:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "NotFound"

    def __bool__(self) -> bool:
        return False


NotFound = _NotFound()


class _Inconsistent:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Inconsistent"


Inconsistent = _Inconsistent()


@dataclass(frozen=True)
class Embedding:
    """A finite map between the node sets of two trees.

    The map may be partial while a construction is in progress; verification
    insists on totality.
    """

    source: FiniteTree
    target: FiniteTree
    map: Mapping[int, int] = field(default_factory=dict)

    def __call__(self, n: int) -> int:
        return self.map[n]

    def domain(self) -> frozenset[int]:
        return frozenset(self.map)

    def image(self) -> frozenset[int]:
        return frozenset(self.map.values())

    def restrict(self, nodes) -> "Embedding":
        keep = set(nodes)
        return Embedding(self.source, self.target, {n: v for n, v in self.map.items() if n in keep})

    def to_text(self) -> str:
        return "".join(f"{n} -> {self.map[n]}\n" for n in sorted(self.map))


def embedding_map_from_text(text: str) -> dict[int, int]:
    from .errors import ParseError

    out: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("->")
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<src> -> <dst>'")
        try:
            out[int(parts[0])] = int(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# search


class _Search:
    def __init__(self, a: FiniteTree, b: FiniteTree, fixed: Mapping[int, int]):
        self.a, self.b = a, b
        self.fixed = dict(fixed)
        self.memo: dict[tuple[int, int], bool] = {}
        self._above: dict[int, list[int]] = {}

    def above(self, x: int) -> list[int]:
        """Strict descendants of x in increasing id."""
        hit = self._above.get(x)
        if hit is None:
            hit = self._above[x] = sorted(self.b.descendants(x)[1:])
        return hit

    def fits(self, n: int, x: int) -> bool:
        a, b = self.a, self.b
        return (a.subtree_height(n) <= b.subtree_height(x)
                and a.subtree_size(n) <= b.subtree_size(x)
                and a.subtree_leaves(n) <= b.subtree_leaves(x)
                and self.fixed.get(n, x) == x)

    def can(self, n: int, x: int) -> bool:
        key = (n, x)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.fits(n, x) and self.place(self.a.successors(n), x, [])
            self.memo[key] = hit
        return hit

    def place(self, kids: Sequence[int], x: int, taken: list[int]) -> bool:
        """Can ``kids`` go to pairwise incomparable strict descendants of x avoiding ``taken``?"""
        if not kids:
            return True
        c, rest = kids[0], kids[1:]
        for y in self.above(x):
            if any(self.b.comparable(y, t) for t in taken):
                continue
            if self.can(c, y):
                taken.append(y)
                ok = self.place(rest, x, taken)
                taken.pop()
                if ok:
                    return True
        return False

    def build(self, n: int, x: int, out: dict[int, int]) -> None:
        out[n] = x
        kids = self.a.successors(n)
        taken: list[int] = []
        for i, c in enumerate(kids):
            for y in self.above(x):
                if any(self.b.comparable(y, t) for t in taken):
                    continue
                if not self.can(c, y):
                    continue
                taken.append(y)
                if self.place(kids[i + 1:], x, taken):
                    break
                taken.pop()
            else:  # pragma: no cover - guarded by can()
                raise AssertionError("inconsistent search state")
            self.build(c, taken[-1], out)


def find_embedding(a: FiniteTree, b: FiniteTree,
                   fixed: Optional[Mapping[int, int]] = None) -> Union[Embedding, _NotFound]:
    """Embed ``a`` into ``b``; the witness is least when read in source preorder.

    ``fixed`` pins some source nodes to given targets.
    """
    fixed = fixed or {}
    for n, v in fixed.items():
        if n not in a or v not in b:
            return NotFound
    if not fixed and a.subtree_leaves(a.root) == 1:
        return _embed_chain(a, b)
    s = _Search(a, b, fixed)
    for x in sorted(b.nodes):
        if s.can(a.root, x):
            out: dict[int, int] = {}
            s.build(a.root, x, out)
            return Embedding(a, b, out)
    return NotFound


def _embed_chain(a: FiniteTree, b: FiniteTree) -> Union[Embedding, _NotFound]:
    """Chains embed exactly where the target subtree is tall enough, so greedy is optimal."""
    order = a.preorder()
    h = len(order) - 1
    cands = [x for x in b.nodes if b.subtree_height(x) >= h]
    if not cands:
        return NotFound
    x = min(cands)
    out = {order[0]: x}
    if b.subtree_leaves(x) == 1:
        path = [x]
        while b.successors(path[-1]):
            path.append(b.successors(path[-1])[0])
        return Embedding(a, b, _chain_window_min(order, path, out))
    for depth, n in enumerate(order[1:], 1):
        x = _least_tall_above(b, x, h - depth)
        out[n] = x
    return Embedding(a, b, out)


def _chain_window_min(order, path, out):
    """Greedy least ids along a target chain, using a sliding-window minimum."""
    from collections import deque

    h, top = len(order) - 1, len(path) - 1
    window: deque[int] = deque()  # positions with increasing ids
    right = 0
    pos = 0
    for depth, n in enumerate(order[1:], 1):
        hi = top - (h - depth)
        while right < hi:
            right += 1
            while window and path[window[-1]] > path[right]:
                window.pop()
            window.append(right)
        while window[0] <= pos:
            window.popleft()
        pos = window.popleft()
        out[n] = path[pos]
    return out


def _least_tall_above(b: FiniteTree, x: int, need: int) -> int:
    """Least id y strictly above x with subtree height >= need."""
    best = None
    stack = list(b.successors(x))
    while stack:
        y = stack.pop()
        if b.subtree_height(y) < need:
            continue
        if best is None or y < best:
            best = y
        stack.extend(b.successors(y))
    assert best is not None
    return best


def embeds(a: FiniteTree, b: FiniteTree) -> bool:
    return find_embedding(a, b) is not NotFound


# ---------------------------------------------------------------------------
# verification


@dataclass
class Report:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


def verify_embedding(e: Embedding, limit: int = 10) -> Report:
    """Check totality, injectivity, and that order is preserved and reflected.

    For trees it is enough that every node maps strictly above its parent's
    image and that sibling images are pairwise incomparable.
    """
    src, dst, m = e.source, e.target, e.map
    missing = [n for n in src.nodes if n not in m]
    if missing:
        raise PartialMap(f"map undefined on {sorted(missing)[:limit]}")
    bad: list[str] = []
    outside = sorted(n for n in src.nodes if m[n] not in dst)
    for n in outside[:limit]:
        bad.append(f"image of {n} is not a target node")
    if outside:
        return Report(False, bad)
    seen: dict[int, int] = {}
    for n in sorted(src.nodes):
        v = m[n]
        if v in seen:
            bad.append(f"{seen[v]} and {n} both map to {v}")
        seen.setdefault(v, n)
    for n in src.preorder():
        if len(bad) >= limit:
            break
        p = src.parent(n)
        if p is not None and (m[p] == m[n] or not dst.is_leq(m[p], m[n])):
            bad.append(f"order between {p} and {n} not preserved")
        kids = sorted(src.successors(n), key=lambda c: dst.interval(m[c])[0])
        for c, d in zip(kids, kids[1:]):
            if dst.interval(m[d])[0] < dst.interval(m[c])[1]:
                bad.append(f"siblings {c} and {d} map to comparable nodes")
    return Report(not bad, bad[:limit])


def weakly_nontrivial(e: Embedding) -> bool:
    return any(n != v for n, v in e.map.items())


def nontrivial(e: Embedding, p: Union[StagewiseTree, FiniteTree], s: Optional[int] = None,
               margin: int = 0) -> bool:
    """Horizon reading of "not onto": some node of T_{s-margin} misses the image of T_s."""
    if isinstance(p, FiniteTree):
        old, cur = p, p
    else:
        s = p.horizon if s is None else s
        cur, old = p.freeze(s), p.freeze(max(0, s - margin))
    image = {e.map[n] for n in cur.nodes if n in e.map}
    return any(n not in image for n in old.nodes)


# ---------------------------------------------------------------------------
# composition


def identity(t: FiniteTree) -> Embedding:
    return Embedding(t, t, {n: n for n in t.nodes})


def compose(f: Embedding, g: Embedding) -> Embedding:
    """``g`` after ``f``; defined where both steps are."""
    out = {n: g.map[v] for n, v in f.map.items() if v in g.map}
    return Embedding(f.source, g.target, out)


def iterate(e: Embedding, k: int, partial: bool = False) -> Embedding:
    """The k-fold composite of a self-map.

    With ``partial`` the result is restricted to nodes whose iterates stay
    inside the domain; otherwise escaping raises.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    dom = e.source.nodes
    out: dict[int, int] = {}
    for n in sorted(dom):
        v = n
        for step in range(k):
            if v not in e.map:
                if partial:
                    break
                raise EscapesHorizon(f"iterate {step} of {n} leaves the domain",
                                     progress={"node": n, "steps": step, "at": v})
            v = e.map[v]
        else:
            out[n] = v
    return Embedding(e.source, e.target, out)


def orbit(e: Embedding, n: int, k: int) -> list[int]:
    """``[n, e(n), …, e^k(n)]``, raising if an iterate is undefined."""
    out = [n]
    for step in range(k):
        v = out[-1]
        if v not in e.map:
            raise EscapesHorizon(f"iterate {step} of {n} leaves the domain",
                                 progress={"node": n, "orbit": out})
        out.append(e.map[v])
    return out


# ---------------------------------------------------------------------------
# binary strings


class TreeSuccessorOracle:
    """Honest successor oracle read off a frozen tree."""

    def __init__(self, t: FiniteTree):
        self.t = t

    def is_successor(self, m: int, n: int) -> bool:
        return n in self.t and self.t.parent(n) == m


def embed_into_binary(p: Union[StagewiseTree, FiniteTree], n: int, succ_oracle=None) -> str:
    """Code ``n`` as ``1^{n_0} 0 1^{n_1} 0 … 1^{n_k} 0`` along its successor chain."""
    t = p if isinstance(p, FiniteTree) else p.freeze()
    oracle = succ_oracle or TreeSuccessorOracle(t)
    if n not in t:
        raise OracleFailure(f"{n} is not a node")
    path = [n]
    while path[-1] != t.root:
        cur = path[-1]
        preds = [m for m in t.nodes if m != cur and oracle.is_successor(m, cur)]
        if len(preds) != 1:
            raise OracleFailure(f"oracle gives {len(preds)} predecessors for {cur}")
        if preds[0] in path:
            raise OracleFailure("oracle successor relation has a cycle")
        path.append(preds[0])
    path.reverse()
    return "".join("1" * m + "0" for m in path)


# ---------------------------------------------------------------------------
# Kruskal window


def kruskal_index(seq: Sequence[FiniteTree], window: int,
                  embeds_fn: Callable[[FiniteTree, FiniteTree], bool] = embeds):
    """Least k such that every i in [k, window/2) embeds into >= 2 later trees.

    Later means j in (i, window).  Returns ``Inconsistent`` when even the last
    asserted index fails.  This is a falsification check only.
    """
    if len(seq) < window:
        raise ValueError("sequence shorter than window")
    half = (window + 1) // 2  # indices i < window/2
    bad = -1
    cache: dict[tuple[int, int], bool] = {}
    for i in range(half):
        hits = 0
        for j in range(i + 1, window):
            key = (id(seq[i]), id(seq[j]))
            if key not in cache:
                cache[key] = embeds_fn(seq[i], seq[j])
            if cache[key]:
                hits += 1
                if hits >= 2:
                    break
        if hits < 2:
            bad = i
    k = bad + 1
    return Inconsistent if k >= half else k
