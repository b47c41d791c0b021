"""Descending-staircase tree coding K into marker positions.

The root 0 has every positive even number as a successor.  Each T(e) is a
chain.  Markers split the evens into blocks; inside a block chain heights
strictly descend, and each block sits above the previous block's marker
height.  When an element enters K, markers merge blocks and chains are
lengthened just enough to keep that shape.

Only components e <= ``window`` are materialized.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Optional

from ..embedding import Embedding
from ..errors import EscapesHorizon, HorizonTooSmall
from ..oracles import MockCeSet
from ..trees import FiniteTree, GroundTruth, StagewiseTree

EXTEND_TOP = "extend-top"
INSERT_BOTTOM = "insert-bottom"


class MarkerTrace:
    """Marker positions per stage.

    The markers at any stage are the positive evens minus a finite removed
    set, so the whole infinite sequence is stored exactly.
    """

    def __init__(self) -> None:
        self._changes: list[tuple[int, frozenset[int]]] = [(0, frozenset())]

    def _removed(self, s: int) -> frozenset[int]:
        k = bisect.bisect_right([c[0] for c in self._changes], s) - 1
        return self._changes[k][1]

    def record(self, s: int, removed: frozenset[int]) -> None:
        if removed != self._changes[-1][1]:
            if self._changes[-1][0] == s:
                self._changes[-1] = (s, removed)
            else:
                self._changes.append((s, removed))

    def change_stages(self) -> list[int]:
        return [c[0] for c in self._changes]

    def value(self, i: int, s: int) -> int:
        """m_{i,s}."""
        removed = self._removed(s)
        e, idx = 0, -1
        while idx < i:
            e += 2
            if e not in removed:
                idx += 1
        return e

    def markers_upto(self, bound: int, s: int) -> list[int]:
        removed = self._removed(s)
        return [e for e in range(2, bound + 1, 2) if e not in removed]

    def block_starts(self, bound: int, s: int) -> list[int]:
        """Markers up to ``bound`` together with the fixed block start 2."""
        ms = self.markers_upto(bound, s)
        return ms if ms and ms[0] == 2 else [2] + ms

    def index_of(self, e: int, s: int) -> Optional[int]:
        """i with m_{i,s} = e, or None when e is not a marker."""
        removed = self._removed(s)
        if e in removed or e < 2 or e % 2:
            return None
        return e // 2 - 1 - sum(1 for r in removed if r < e)


@dataclass
class StaircaseResult:
    tree: StagewiseTree
    markers: MarkerTrace
    window: int
    mode: str
    heights: dict[int, dict[int, int]] = field(default_factory=dict)  # change stage -> e -> ht
    log: list[dict] = field(default_factory=list)

    def floor(self, m: int) -> int:
        """The even successor of the root below m."""
        t = self.tree.freeze()
        if m == t.root:
            raise ValueError("the root lies in no component")
        return t.ancestors(m)[1]


class _Builder:
    def __init__(self, k: MockCeSet, horizon: int, mode: str, window: int):
        if mode not in (EXTEND_TOP, INSERT_BOTTOM):
            raise ValueError(f"unknown mode {mode!r}")
        self.k, self.horizon, self.mode, self.window = k, horizon, mode, window
        md = GroundTruth(tree_type=1, infinite_nodes=frozenset({0}), omega_nodes=frozenset({0}),
                         maximal_infinite=0)
        self.tree = StagewiseTree(md)
        self.markers = MarkerTrace()
        self.removed: set[int] = set()
        self.height: dict[int, int] = {}
        self.top: dict[int, int] = {}  # current top node of each chain
        self.next_odd = 1

    def fresh(self) -> int:
        n = self.next_odd
        self.next_odd += 2
        return n

    def grow(self, e: int, by: int) -> list[int]:
        added = []
        for _ in range(by):
            x = self.fresh()
            if self.mode == EXTEND_TOP or self.height[e] == 0:
                self.tree.add(x, self.top[e])
                self.top[e] = x
            else:
                (child,) = self.tree.live_children(e)
                self.tree.add(x, e, below=child)
            self.height[e] += 1
            added.append(x)
        return added

    def marker_list(self) -> list[int]:
        return [e for e in range(2, self.window + 1, 2) if e not in self.removed]

    def block_starts(self) -> list[int]:
        ms = self.marker_list()
        return ms if ms and ms[0] == 2 else [2] + ms

    def initial(self) -> None:
        self.tree.add(0, None)
        for e in range(2, self.window + 1, 2):
            self.tree.add(e, 0)
            self.height[e] = 0
            self.top[e] = e
            self.grow(e, e)

    def enter(self, i: int, s: int) -> list[int]:
        """Element i enters K at stage s+1 (markers move per the update rule)."""
        ms = self.marker_list()
        if i >= len(ms):
            raise HorizonTooSmall(f"marker {i} lies beyond the window {self.window}")
        k = i
        while k < len(ms) and ms[k] < s + 1:
            k += 1
        if k >= len(ms):
            raise HorizonTooSmall(f"no marker >= {s + 1} inside the window {self.window}")
        old = ms[i]
        self.removed.update(ms[i:k])
        starts = self.block_starts()
        merged = bisect.bisect_right(starts, old) - 1
        return self.repair(merged)

    def repair(self, first_block: int) -> list[int]:
        """Least height increase restoring strict descent inside blocks and the step up at markers."""
        ms = self.block_starts()
        added: list[int] = []
        prev_top = self.height[ms[first_block - 1]] if first_block > 0 else -1
        for j in range(first_block, len(ms)):
            lo = ms[j]
            hi = ms[j + 1] if j + 1 < len(ms) else None
            if hi is None:
                # the last block is cut by the window; it must already be in shape
                if self.height[lo] <= prev_top:
                    raise HorizonTooSmall(f"height repair runs past the window {self.window}")
                break
            block = list(range(lo, hi, 2))
            need = prev_top + 1
            changed = False
            for e in reversed(block):
                target = max(self.height[e], need)
                if target > self.height[e]:
                    added += self.grow(e, target - self.height[e])
                    changed = True
                need = self.height[e] + 1
            prev_top = self.height[lo]
            if not changed and j > first_block + 1:
                break
        return added


def staircase_build(k: MockCeSet, horizon: int, mode: str = EXTEND_TOP,
                    window: Optional[int] = None) -> StaircaseResult:
    """Run the marker construction against K up to ``horizon``.

    ``window`` bounds the largest materialized component root (default
    ``2*horizon + 32``).
    """
    if any(t > horizon for _, t in k.events):
        raise HorizonTooSmall("K has events beyond the horizon")
    window = window if window is not None else 2 * horizon + 32
    window -= window % 2
    b = _Builder(k, horizon, mode, window)
    b.initial()
    res = StaircaseResult(b.tree, b.markers, window, mode)
    res.heights[0] = dict(b.height)
    res.log.append({"stage": 0, "added": len(b.tree), "markers": b.marker_list()[:12]})
    for s in range(1, horizon + 1):
        b.tree.new_stage()
        added: list[int] = []
        for x in sorted(k.entering_at(s)):
            added += b.enter(x, s - 1)
        b.markers.record(s, frozenset(b.removed))
        if added:
            res.heights[s] = dict(b.height)
        res.log.append({"stage": s, "added": added, "entered": sorted(k.entering_at(s)),
                        "markers": b.marker_list()[:12]})
    return res


# ---------------------------------------------------------------------------
# property checks


def heights_at(res: StaircaseResult, s: int) -> dict[int, int]:
    """ht(T_s(e)) for every materialized component, read from the frozen tree."""
    t = res.tree.freeze(s)
    return {e: t.subtree_height(e) for e in t.successors(t.root)}


def check_properties(res: StaircaseResult, s: int, k: Optional[MockCeSet] = None,
                     i_max: int = 5) -> dict[str, bool]:
    """Properties I and II on complete blocks at stage s; III at the horizon."""
    h = heights_at(res, s)
    ms = res.markers.block_starts(res.window, s)
    ok1 = all(h[ms[j]] < h[ms[j + 1]] for j in range(len(ms) - 1))
    ok2 = True
    for j in range(len(ms) - 1):
        block = list(range(ms[j], ms[j + 1], 2))
        if any(h[p] <= h[q] for p, q in zip(block, block[1:])):
            ok2 = False
        if j > 0 and any(h[q] <= h[ms[j - 1]] for q in block):
            ok2 = False
    out = {"I": ok1, "II": ok2}
    if k is not None:
        H = res.tree.horizon
        out["III"] = all(
            {x for x in k.members() if x < i} == set(ce_at(k, res.markers.value(i, H), i))
            for i in range(i_max + 1))
    return out


def ce_at(k: MockCeSet, s: int, n: int) -> frozenset[int]:
    return frozenset(x for x, t in k.events if t <= s and x < n)


# ---------------------------------------------------------------------------
# decoding


@dataclass
class DecodeResult:
    psi: list[int]
    prefixes: dict[int, frozenset[int]]

    def bits(self, i_max: int) -> list[bool]:
        top = self.prefixes[i_max]
        return [x in top for x in range(i_max)]


def staircase_decode(e: Embedding, n: int, i_max: int, k: MockCeSet,
                     floor=None) -> DecodeResult:
    """Recover K[i] for i <= i_max as K_{psi(i)}[i] from a self-embedding moving n.

    ``floor`` maps a node to its component root; by default the ancestor of
    height one in the target tree (iterates may leave the source).
    """
    t: FiniteTree = e.target
    if e.map.get(n, n) == n:
        raise ValueError(f"the embedding does not move node {n}")
    if floor is None:
        def floor(m: int) -> int:
            return t.ancestors(m)[1]
    psi = [floor(n)]
    cur = n
    while len(psi) <= i_max:
        if cur not in e.map:
            raise EscapesHorizon(f"psi stalls after {len(psi)} values",
                                 progress={"psi": list(psi)})
        cur = e.map[cur]
        if cur == t.root:
            raise EscapesHorizon("iterate reached the root", progress={"psi": list(psi)})
        f = floor(cur)
        if f > psi[-1]:
            psi.append(f)
    prefixes = {i: ce_at(k, psi[i], i) for i in range(i_max + 1)}
    return DecodeResult(psi, prefixes)
