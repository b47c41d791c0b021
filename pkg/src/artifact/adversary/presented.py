"""Incremental reading of an opponent's height-four tree and partial map.

The opponent presents nodes as (node, parent) events, or as block events
(root, parent, signature) that add a whole small tree whose ids run
consecutively: root, its children in signature order, then the
grandchildren child by child.  The view keeps,
for every level-1 node, the multiset of shapes of the small trees hanging
from it, so that type-D counts and isomorphism with one of our own
components are O(1) lookups.  Node ids are small non-negative integers
and are stored in flat arrays.
"""

from __future__ import annotations

from array import array
from collections import Counter
from typing import Iterable, Optional

from ..errors import AdversaryViolation
from ..trees import ComponentKind, FiniteTree

# A small tree hanging at level 2 is summarised by the sorted tuple of
# grandchild counts of its children.
SIG_A = (0, 0)
SIG_B = (0, 1)
SIG_C = (0, 0, 0)
SIG_D = (0, 0, 0, 0)
KIND_SIG = {ComponentKind.A: SIG_A, ComponentKind.B: SIG_B,
            ComponentKind.C: SIG_C, ComponentKind.D: SIG_D}
SIG_KIND = {v: k for k, v in KIND_SIG.items()}
# shapes that can still grow into A, B, C or D
LEGAL = frozenset({(), (0,), (1,), SIG_A, SIG_B, SIG_C, SIG_D})

ABSENT = -2
ROOT = -1


def sig_tree(sig: tuple[int, ...]) -> FiniteTree:
    """A concrete tree with the given signature."""
    pm: dict[int, Optional[int]] = {0: None}
    nxt = 1
    for g in sig:
        c = nxt
        pm[c] = 0
        nxt += 1
        for _ in range(g):
            pm[nxt] = c
            nxt += 1
    return FiniteTree(pm)


def sig_size(sig: tuple[int, ...]) -> int:
    return 1 + len(sig) + sum(sig)


def block_layout(x: int, sig: tuple[int, ...]) -> list[tuple[int, int]]:
    """(node, parent) pairs of a block rooted at x, in id order."""
    out = [(x, -1)]
    kids = list(range(x + 1, x + 1 + len(sig)))
    out += [(c, x) for c in kids]
    nxt = x + 1 + len(sig)
    for c, g in zip(kids, sig):
        for _ in range(g):
            out.append((nxt, c))
            nxt += 1
    return out


_TEMPLATES: dict[tuple[int, ...], tuple[list[int], array]] = {}


def _template(sig: tuple[int, ...]) -> tuple[list[int], array]:
    """Parent offsets (relative to the block root) and levels of a block."""
    if sig not in _TEMPLATES:
        lay = block_layout(0, sig)
        _TEMPLATES[sig] = ([q for _, q in lay[1:]],
                           array("i", [2] + [3 if q == 0 else 4 for _, q in lay[1:]]))
    return _TEMPLATES[sig]


def sig_name(sig: tuple[int, ...]) -> str:
    k = SIG_KIND.get(sig)
    return k.value if k is not None else "partial" + "".join(map(str, sig))


class _IntArray:
    """Growable int array with a default fill."""

    def __init__(self, fill: int):
        self.fill = fill
        self.a = array("i")

    def get(self, i: int) -> int:
        return self.a[i] if i < len(self.a) else self.fill

    def reserve(self, i: int) -> None:
        if i >= len(self.a):
            self.a.extend([self.fill] * (i + 1 - len(self.a) + len(self.a) // 2))

    def set(self, i: int, v: int) -> None:
        self.reserve(i)
        self.a[i] = v


class PresentedTree:
    """The opponent's tree at the current stage, read incrementally."""

    def __init__(self, name: str = "tree"):
        self.name = name
        self.parent = _IntArray(ABSENT)
        self.level = _IntArray(-1)
        self.root: Optional[int] = None
        self.broken: Optional[str] = None
        self.comp_subs: dict[int, list[int]] = {}
        self.comp_nodes: dict[int, list[int]] = {}
        self.comp_sig: dict[int, Counter] = {}
        self.version: dict[int, int] = {}
        self.sub_kids: dict[int, list[int]] = {}
        self.sub_sig: dict[int, tuple[int, ...]] = {}
        self.l3_kids: dict[int, list[int]] = {}
        self.by_dcount: dict[int, set[int]] = {}
        self._blocks: set[int] = set()  # small trees still in block layout
        # log of (first node, count, level-1 ancestor or -1), read by map programs
        self.log_node = array("i")
        self.log_len = array("i")
        self.log_comp = array("i")
        self.changed: list[int] = []  # components touched, in order
        self.size = 0

    # -- queries ------------------------------------------------------
    def __contains__(self, x: int) -> bool:
        return x >= 0 and self.parent.get(x) != ABSENT

    def parent_of(self, x: int) -> Optional[int]:
        p = self.parent.get(x)
        return None if p == ROOT else p

    def level_of(self, x: int) -> int:
        return self.level.get(x)

    def comp_of(self, x: int) -> Optional[int]:
        """Level-1 ancestor of x (None for the root or absent nodes)."""
        if x not in self:
            return None
        while self.level.get(x) > 1:
            x = self.parent.get(x)
        return x if self.level.get(x) == 1 else None

    def is_component(self, c: int) -> bool:
        return c in self.comp_sig and self.comp_sig[c][SIG_B] >= 1

    def components(self) -> list[int]:
        return sorted(c for c in self.comp_sig if self.is_component(c))

    def dcount(self, c: int) -> int:
        return self.comp_sig[c][SIG_D]

    def shape_counts(self, c: int) -> Counter:
        return +self.comp_sig[c]

    def component_with_dcount(self, k: int) -> Optional[int]:
        pool = [c for c in self.by_dcount.get(k, ()) if self.is_component(c)]
        return min(pool) if pool else None

    def sub_size(self, x: int) -> int:
        return sig_size(self.sub_sig[x])

    def contiguous(self, x: int) -> bool:
        """The small tree at x still has the block id layout."""
        return x in self._blocks

    def children(self, x: int) -> list[int]:
        lv = self.level.get(x)
        if lv == 1:
            return self.comp_subs.get(x, [])
        if lv == 2:
            return self.sub_kids.get(x, [])
        if lv == 3:
            return self.l3_kids.get(x, [])
        return []

    def sub_containing(self, x: int) -> Optional[int]:
        """The level-2 node at or below x on its ancestor chain."""
        while x in self and self.level.get(x) > 2:
            x = self.parent.get(x)
        return x if x in self and self.level.get(x) == 2 else None

    def strictly_below(self, x: int, y: int) -> bool:
        """x is a proper ancestor of y."""
        while True:
            p = self.parent.get(y)
            if p < 0:
                return False
            if p == x:
                return True
            y = p

    # -- updates ------------------------------------------------------
    def add(self, x: int, p: Optional[int]) -> None:
        if x < 0:
            raise AdversaryViolation(f"{self.name}: negative node id {x}")
        old = self.parent.get(x)
        want = ROOT if p is None else p
        if old != ABSENT:
            if old != want:
                raise AdversaryViolation(f"{self.name}: node {x} moved from {old} to {want}")
            return
        if p is None:
            if self.root is not None:
                self.broken = self.broken or f"second root {x}"
                return
            self.root = x
            self.parent.set(x, ROOT)
            self.level.set(x, 0)
            self._log(x, -1)
            return
        if p not in self:
            raise AdversaryViolation(f"{self.name}: node {x} arrives before its parent {p}")
        lv = self.level.get(p) + 1
        self.parent.set(x, p)
        self.level.set(x, lv)
        self.size += 1
        if lv > 4:
            self.broken = self.broken or f"node {x} at level {lv}"
            self._log(x, -1)
            return
        if lv == 1:
            self.comp_subs[x] = []
            self.comp_nodes[x] = [x]
            self.comp_sig[x] = Counter()
            self.version[x] = 0
            self.by_dcount.setdefault(0, set()).add(x)
            self._touch(x, x)
            return
        if lv == 2:
            c = p
            self.comp_subs[c].append(x)
            self.sub_kids[x] = []
            self.sub_sig[x] = ()
            self.comp_sig[c][()] += 1
            self._touch(c, x)
            return
        if lv == 3:
            sub = p
            self.sub_kids[sub].append(x)
        else:
            self.l3_kids.setdefault(p, []).append(x)
            sub = self.parent.get(p)
        c = self.parent.get(sub)
        self._blocks.discard(sub)
        self._resig(c, sub)
        self._touch(c, x)

    def _resig(self, c: int, sub: int) -> None:
        old = self.sub_sig[sub]
        new = tuple(sorted(len(self.l3_kids.get(k, ())) for k in self.sub_kids[sub]))
        if old == SIG_D and new != old:
            self.broken = self.broken or f"type D tree at {sub} grew"
        if new not in LEGAL:
            self.broken = self.broken or f"subtree at {sub} has shape {new}"
        cs = self.comp_sig[c]
        d0 = cs[SIG_D]
        cs[old] -= 1
        cs[new] += 1
        self.sub_sig[sub] = new
        d1 = cs[SIG_D]
        if d1 != d0:
            self.by_dcount[d0].discard(c)
            self.by_dcount.setdefault(d1, set()).add(c)

    def add_block(self, x: int, p: int, sig: tuple[int, ...]) -> None:
        """A whole small tree at level 2; falls back to single nodes elsewhere."""
        n = sig_size(sig)
        pa, la = self.parent, self.level
        pa.reserve(x + n - 1)
        la.reserve(x + n - 1)
        if (p not in self or la.get(p) != 1 or sig not in LEGAL
                or pa.a[x:x + n].count(ABSENT) != n):
            for y, q in block_layout(x, sig):
                self.add(y, p if q < 0 else q)
            return
        rel, lv = _template(sig)
        pa.a[x:x + n] = array("i", [p] + [x + o for o in rel])
        la.a[x:x + n] = lv
        kids = list(range(x + 1, x + 1 + len(sig)))
        if sig and sig[-1]:
            nxt = x + 1 + len(sig)
            for c, g in zip(kids, sig):
                if g:
                    self.l3_kids[c] = list(range(nxt, nxt + g))
                    nxt += g
        self.size += n
        self.comp_subs[p].append(x)
        self._blocks.add(x)
        self.sub_kids[x] = kids
        self.sub_sig[x] = sig
        cs = self.comp_sig[p]
        cs[sig] += 1
        if sig == SIG_D:
            d = cs[SIG_D]
            self.by_dcount[d - 1].discard(p)
            self.by_dcount.setdefault(d, set()).add(p)
        self.comp_nodes[p].extend(range(x, x + n))
        self.version[p] += 1
        self.changed.append(p)
        self._log(x, p, n)

    def _touch(self, c: int, x: int) -> None:
        if x != c:
            self.comp_nodes[c].append(x)
        self.version[c] += 1
        self.changed.append(c)
        self._log(x, c)

    def _log(self, x: int, c: int, n: int = 1) -> None:
        self.log_node.append(x)
        self.log_len.append(n)
        self.log_comp.append(c)

    def apply(self, events: Iterable[tuple]) -> None:
        for ev in events:
            if len(ev) == 3:
                self.add_block(*ev)
            else:
                self.add(*ev)


class PartialMap:
    """An opponent's partial map, values never retracted.

    Tracks, per component of the view, how many of its nodes still lack
    a value.
    """

    def __init__(self, view: PresentedTree, name: str = "map"):
        self.view = view
        self.name = name
        self.val = _IntArray(-1)
        self.missing: dict[int, int] = {}
        self.version: dict[int, int] = {}
        self._cursor = 0

    def get(self, x: int) -> Optional[int]:
        v = self.val.get(x) if x >= 0 else -1
        return None if v < 0 else v

    def _undefined(self, x: int, n: int) -> int:
        a = self.val.a
        if x >= len(a):
            return n
        return a[x:x + n].count(-1) + max(0, x + n - len(a))

    def define_block(self, x: int, y: int, n: int) -> None:
        """x+i -> y+i for i < n."""
        a = self.val
        a.reserve(x + n - 1)
        old = a.a[x:x + n]
        if old.count(-1) != n:
            for i in range(n):
                self.define(x + i, y + i)
            return
        a.a[x:x + n] = array("i", range(y, y + n))
        c = self.view.comp_of(x)
        if c is not None:
            self.missing[c] -= n
            self.version[c] = self.version.get(c, 0) + 1

    def define(self, x: int, y: int) -> None:
        old = self.val.get(x)
        if old >= 0:
            if old != y:
                raise AdversaryViolation(f"{self.name}: value at {x} changed from {old} to {y}")
            return
        self.val.set(x, y)
        c = self.view.comp_of(x)
        if c is not None:
            self.missing[c] -= 1
            self.version[c] = self.version.get(c, 0) + 1

    def sync(self) -> None:
        """Account for nodes the view gained since the last call."""
        v = self.view
        for i in range(self._cursor, len(v.log_node)):
            c = v.log_comp[i]
            if c < 0:
                continue
            self.missing[c] = self.missing.get(c, 0) + self._undefined(v.log_node[i], v.log_len[i])
            self.version[c] = self.version.get(c, 0) + 1
        self._cursor = len(v.log_node)

    def total_on(self, c: int) -> bool:
        return self.missing.get(c, 1) == 0

    def embeds(self, u: int, v: int) -> bool:
        """The map sends component u into component v as an embedding."""
        view = self.view
        if not self.total_on(u) or u == v:
            return False
        nodes = view.comp_nodes[u]
        img = [self.get(x) for x in nodes]
        if len(set(img)) != len(img):
            return False
        for y in img:
            if view.comp_of(y) != v:
                return False
        for x, y in zip(nodes, img):
            p = view.parent_of(x)
            if p is not None and view.level_of(x) > 1 and not view.strictly_below(self.get(p), y):
                return False
            kids = {self.get(k) for k in view.children(x)}
            for k in kids:
                z = view.parent_of(k)
                while z is not None:
                    if z in kids:
                        return False
                    z = view.parent_of(z)
        return True
