"""Branching-level coding of the approximation stack into a c.e. subtree of 2^{<omega}.

Strings are kept run-length style as ``(length, ones)`` where ``ones`` is
the sorted tuple of positions holding a 1.  The enumerated tree is stored as
a map ``reach``: for a tuple P of one-positions, ``reach[P]`` is the largest
length L such that the string with ones P and length L is in the tree.  Every
string the construction adds has at most ``depth + 1`` ones, so the map stays
small even though strings grow with the stage.

Only sigma of the form rho * 0^(s - depth) are enumerated; ``Type3Limit``
describes the limit tree with every level past the coded ones branching.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from ..binary import check_bits, is_prefix
from ..errors import BadSigmaLength, DuplicateString, HorizonTooSmall
from ..trees import FiniteTree

Packed = tuple[int, tuple[int, ...]]


# ---------------------------------------------------------------------------
# packed strings


def pack(bits: str) -> Packed:
    check_bits(bits)
    return len(bits), tuple(i for i, b in enumerate(bits) if b == "1")


def unpack(p: Packed) -> str:
    n, ones = p
    out = ["0"] * n
    for i in ones:
        out[i] = "1"
    return "".join(out)


def packed_prefix(p: Packed, q: Packed) -> bool:
    """p is an initial segment of q."""
    (lp, op), (lq, oq) = p, q
    if lp > lq:
        return False
    k = len(op)
    return oq[:k] == op and (len(oq) == k or oq[k] >= lp)


# ---------------------------------------------------------------------------
# tau strings


def _a_values(stack, s: int, n: int) -> list[int]:
    """a(i,s) for i <= n; levels past the stack depth read as 0."""
    if hasattr(stack, "a_stage"):
        depth = stack.n_max
        return [stack.a_stage(i, s) if i <= depth else 0 for i in range(n + 1)]
    vals = list(stack)
    return [vals[i] if i < len(vals) else 0 for i in range(n + 1)]


def tau_packed(avals: Sequence[int], sigma: str) -> Packed:
    pos = 0
    ones = []
    for i, bit in enumerate(sigma):
        pos += avals[i] if i < len(avals) else 0
        if bit == "1":
            ones.append(pos)
        pos += 1
    return pos, tuple(ones)


def tau_string(stack, n: int, s: int, sigma: str) -> str:
    """0^{a(0,s)} sigma(0) 0^{a(1,s)} sigma(1) ... 0^{a(n,s)} sigma(n).

    ``stack`` is an ApproxStack or a plain sequence of a-values.
    """
    check_bits(sigma)
    if len(sigma) != n + 1:
        raise BadSigmaLength(f"sigma has length {len(sigma)}, expected {n + 1}")
    if n > s:
        raise ValueError(f"n={n} exceeds the stage s={s}")
    return unpack(tau_packed(_a_values(stack, s, n), sigma))


def branching_levels(avals: Sequence[int], n_max: int) -> list[int]:
    """b(n) = n + sum_{i<=n} a(i), with a(i)=0 past the given values."""
    out, acc = [], 0
    for n in range(n_max + 1):
        acc += avals[n] if n < len(avals) else 0
        out.append(n + acc)
    return out


# ---------------------------------------------------------------------------
# enumerated tree


@dataclass
class Type3Result:
    depth: int
    horizon: int
    reach: dict[tuple[int, ...], int]
    added: list[list[tuple[Packed, int]]]  # per stage s+1: (alpha, new node count)
    a_rows: list[tuple[int, ...]]
    _enum: Optional[list[str]] = field(default=None, repr=False)

    # -- membership and structure ------------------------------------------
    def contains(self, x) -> bool:
        n, ones = pack(x) if isinstance(x, str) else x
        r = self.reach.get(ones)
        return r is not None and (ones[-1] if ones else -1) < n <= r

    __contains__ = contains

    def children(self, x: str) -> list[str]:
        return [x + b for b in "01" if self.contains(x + b)]

    def node_count(self) -> int:
        return sum(r - (p[-1] if p else -1) for p, r in self.reach.items())

    def strings(self, max_len: int) -> list[str]:
        """All members of length <= max_len, in shortlex order."""
        out = []
        frontier = [""] if self.contains("") else []
        while frontier:
            out.extend(frontier)
            if len(frontier[0]) >= max_len:
                break
            frontier = [c for x in frontier for c in self.children(x)]
        return out

    # -- first-come enumeration ---------------------------------------------
    def enumeration(self, limit: int) -> list[str]:
        """The first ``limit`` strings in the order the construction added them."""
        if self._enum is not None and len(self._enum) >= limit:
            return self._enum[:limit]
        reach: dict[tuple[int, ...], int] = {}
        out: list[str] = []
        for stage in self.added:
            for alpha, _ in stage:
                for p, lo, hi in _new_runs(reach, alpha):
                    for length in range(lo, hi + 1):
                        out.append(unpack((length, p)))
                        if len(out) >= limit:
                            self._enum = out
                            return out
                _insert(reach, alpha)
        self._enum = out
        return out

    # -- empirical branching -------------------------------------------------
    def growth_stages(self, x: str, after: int = 0) -> set[int]:
        """Stages > ``after`` at which T(x) gained a node."""
        px = pack(x)
        return {s + 1 for s, stage in enumerate(self.added) if s + 1 > after
                for alpha, new in stage if new and packed_prefix(px, alpha)}

    def empirical_branching(self, max_len: int, late: Optional[int] = None,
                            min_stages: int = 3) -> dict[str, tuple[int, int]]:
        """Nodes of length <= max_len whose two children both gained nodes at
        ``min_stages`` distinct stages after ``late``.

        Returns node -> (late growth stages of child 0, of child 1).
        """
        late = self.horizon // 2 if late is None else late
        cands: dict[tuple[int, ...], list[tuple[int, int, int]]] = {}
        nodes: list[Packed] = []
        for p in self.reach:
            if not p or p[-1] > max_len:
                continue
            parent, length = p[:-1], p[-1]
            if self.reach.get(parent, -1) >= length + 1:
                idx = len(nodes)
                nodes.append((length, parent))
                cands.setdefault(parent, []).append((length + 1, idx, 0))
                cands.setdefault(p, []).append((length + 1, idx, 1))
        for lst in cands.values():
            lst.sort()
        seen: list[tuple[set[int], set[int]]] = [(set(), set()) for _ in nodes]
        for s in range(late, len(self.added)):
            for (n, ones), new in self.added[s]:
                if not new:
                    continue
                for k in range(len(ones) + 1):
                    lst = cands.get(ones[:k])
                    if not lst:
                        continue
                    bound = ones[k] if k < len(ones) else n
                    for length, idx, side in lst[: bisect.bisect_right(lst, (bound, len(nodes), 2))]:
                        seen[idx][side].add(s + 1)
        out = {}
        for idx, node in enumerate(nodes):
            g0, g1 = seen[idx]
            if len(g0) >= min_stages and len(g1) >= min_stages:
                out[unpack(node)] = (len(g0), len(g1))
        return out

    def empirical_levels(self, max_len: int, late: Optional[int] = None,
                         min_stages: int = 3) -> list[int]:
        return sorted({len(x) for x in self.empirical_branching(max_len, late, min_stages)})


def _new_runs(reach: dict, alpha: Packed) -> Iterator[tuple[tuple[int, ...], int, int]]:
    """(ones prefix, first new length, last new length) for the prefixes of alpha not yet present."""
    n, ones = alpha
    for k in range(len(ones) + 1):
        p = ones[:k]
        end = ones[k] if k < len(ones) else n
        low = p[-1] + 1 if p else 0
        start = max(low, reach[p] + 1) if p in reach else low
        if start <= end:
            yield p, start, end


def _insert(reach: dict, alpha: Packed) -> int:
    new = 0
    for p, lo, hi in list(_new_runs(reach, alpha)):
        new += hi - lo + 1
        reach[p] = hi
    return new


def _contains(reach: dict, x: Packed) -> bool:
    n, ones = x
    r = reach.get(ones)
    return r is not None and (ones[-1] if ones else -1) < n <= r


def _children(reach: dict, x: Packed) -> list[Packed]:
    n, ones = x
    return [c for c in ((n + 1, ones), (n + 1, ones + (n,))) if _contains(reach, c)]


def least_new_extension(reach: dict, tau: Packed, max_depth: int = 24) -> Packed:
    """Shortlex-least extension of tau that is not in the tree."""
    if not _contains(reach, tau):
        return tau
    level = [tau]
    for _ in range(max_depth):
        nxt = []
        for x in level:  # level is in lexicographic order
            n, ones = x
            for c in ((n + 1, ones), (n + 1, ones + (n,))):
                if not _contains(reach, c):
                    return c
                nxt.append(c)
        level = nxt
    raise HorizonTooSmall(f"no free extension within {max_depth} levels")


def type3_build(stack, horizon: int, depth: Optional[int] = None) -> Type3Result:
    """Enumerate the tree to stage ``horizon``.

    At stage s+1 every sigma = rho * 0^(s-depth) with |rho| = depth+1
    contributes alpha_sigma, the shortlex-least extension of tau_{s,s}^sigma
    not already present.  All alphas of a stage are chosen against T_s.
    """
    depth = stack.n_max if depth is None else depth
    if hasattr(stack, "require_horizon"):
        stack.require_horizon(horizon)
    reach: dict[tuple[int, ...], int] = {}
    added: list[list[tuple[Packed, int]]] = []
    rows: list[tuple[int, ...]] = []
    for s in range(horizon):
        width = min(s, depth) + 1
        avals = _a_values(stack, s, width - 1)
        rows.append(tuple(avals))
        alphas = []
        for r in range(2 ** width):
            rho = format(r, f"0{width}b")
            n, ones = tau_packed(avals, rho)
            tau = (n + (s + 1 - width), ones)
            alphas.append(least_new_extension(reach, tau))
        stage = []
        for alpha in alphas:
            stage.append((alpha, _insert(reach, alpha)))
        added.append(stage)
    return Type3Result(depth, horizon, reach, added, rows)


# ---------------------------------------------------------------------------
# limit view


class Type3Limit:
    """The limit tree's infinite part, read from the declared a-values.

    A string lies on it iff every bit outside the coded positions
    b(0) < b(1) < ... < b(depth) is 0 (bits past b(depth) are free).  Its
    branching nodes are exactly those of length b(n) for some n, and every
    length past b(depth) is a branching level.
    """

    def __init__(self, avals: Sequence[int]):
        self.avals = list(avals)
        self.depth = len(self.avals) - 1
        self.levels = branching_levels(self.avals, self.depth)
        self._coded = set(self.levels)
        self.top = self.levels[-1] if self.levels else -1

    @classmethod
    def from_stack(cls, stack) -> "Type3Limit":
        return cls(stack.truth().a)

    def b(self, n: int) -> int:
        return self.levels[n] if n <= self.depth else self.top + (n - self.depth)

    def infinite(self, x: str) -> bool:
        for i, bit in enumerate(x):
            if i > self.top:
                return True
            if bit == "1" and i not in self._coded:
                return False
        return True

    def is_branching(self, x: str) -> bool:
        return self.infinite(x) and (len(x) in self._coded or len(x) > self.top)

    def successors(self, x: str) -> list[str]:
        return [x + b for b in "01" if self.infinite(x + b)]

    def next_branching(self, x: str) -> str:
        """The least branching node extending x (x must be on the tree)."""
        if len(x) > self.top or len(x) in self._coded:
            return x
        nxt = self.levels[bisect.bisect_left(self.levels, len(x))]
        return x + "0" * (nxt - len(x))

    def nodes(self, max_len: int) -> Iterator[str]:
        """Shortlex enumeration of the infinite part up to ``max_len``."""
        level = [""]
        while level and len(level[0]) <= max_len:
            yield from level
            level = [c for x in level for c in self.successors(x)]


# ---------------------------------------------------------------------------
# relabelling


@dataclass
class Relabelled:
    strings: list[str]
    index: dict[str, int]
    tree: FiniteTree

    def is_successor(self, n: int, m: int) -> bool:
        """m is an immediate successor of n: string(m) minus its last bit is string(n)."""
        sm = self.strings[m]
        return len(sm) > 0 and sm[:-1] == self.strings[n]

    def leq(self, n: int, m: int) -> bool:
        return is_prefix(self.strings[n], self.strings[m])


def relabel_computable(enumeration: Sequence[str]) -> Relabelled:
    """Node n is the n-th enumerated string; order is inclusion of strings.

    The enumeration must be prefix-closed as it goes (each string's parent
    string appears earlier), which holds for any first-come listing of a tree.
    """
    index: dict[str, int] = {}
    parent: dict[int, Optional[int]] = {}
    for i, x in enumerate(enumeration):
        check_bits(x)
        if x in index:
            raise DuplicateString(f"string {x!r} enumerated twice")
        index[x] = i
        if x == "":
            parent[i] = None
            continue
        p = index.get(x[:-1])
        if p is None:
            raise ValueError(f"string {x!r} appears before its parent")
        parent[i] = p
    return Relabelled(list(enumeration), index, FiniteTree(parent))
