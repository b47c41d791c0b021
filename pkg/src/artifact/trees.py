"""Finite rooted trees, stagewise presentations and structural queries.

A tree is a partial order with a least element in which every down-set is a
finite chain.  Here it is stored as a parent map over natural-number ids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .errors import (
    DuplicateNode,
    MissingMetadata,
    MultipleRoots,
    OrphanParent,
    ParseError,
    UnknownNode,
)

ROOT = None  # parent marker for the root event


class FiniteTree:
    """Immutable finite rooted tree given by a parent map.

    ``parent[root]`` is ``None``.  Children lists are kept sorted by id so
    every traversal is deterministic.
    """

    __slots__ = (
        "_parent", "_children", "root", "_depth", "_tin", "_tout",
        "_sub_height", "_sub_size", "_sub_leaves", "_order",
    )

    def __init__(self, parent: Mapping[int, Optional[int]]):
        roots = [n for n, p in parent.items() if p is None]
        if not roots:
            raise ParseError("tree has no root")
        if len(roots) > 1:
            raise MultipleRoots(f"several roots: {sorted(roots)}")
        self._parent: dict[int, Optional[int]] = dict(parent)
        self.root: int = roots[0]
        children: dict[int, list[int]] = {n: [] for n in self._parent}
        for n, p in self._parent.items():
            if p is None:
                continue
            if p not in children:
                raise OrphanParent(f"parent {p} of {n} is not a node")
            children[p].append(n)
        for lst in children.values():
            lst.sort()
        self._children = {n: tuple(c) for n, c in children.items()}
        self._index()

    def _index(self) -> None:
        depth = {self.root: 0}
        tin: dict[int, int] = {}
        tout: dict[int, int] = {}
        order: list[int] = []
        stack: list[tuple[int, bool]] = [(self.root, False)]
        clock = 0
        while stack:
            n, done = stack.pop()
            if done:
                tout[n] = clock
                continue
            tin[n] = clock
            clock += 1
            order.append(n)
            stack.append((n, True))
            for c in reversed(self._children[n]):
                depth[c] = depth[n] + 1
                stack.append((c, False))
        if len(order) != len(self._parent):
            raise ParseError("parent map contains a cycle")
        self._depth = depth
        self._tin = tin
        self._tout = tout
        self._order = tuple(order)
        sub_h: dict[int, int] = {}
        sub_n: dict[int, int] = {}
        sub_l: dict[int, int] = {}
        for n in reversed(order):
            cs = self._children[n]
            if cs:
                sub_h[n] = 1 + max(sub_h[c] for c in cs)
                sub_n[n] = 1 + sum(sub_n[c] for c in cs)
                sub_l[n] = sum(sub_l[c] for c in cs)
            else:
                sub_h[n], sub_n[n], sub_l[n] = 0, 1, 1
        self._sub_height = sub_h
        self._sub_size = sub_n
        self._sub_leaves = sub_l

    # -- basic access -------------------------------------------------
    def _check(self, n: int) -> None:
        if n not in self._parent:
            raise UnknownNode(n)

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self._parent)

    def __len__(self) -> int:
        return len(self._parent)

    def __contains__(self, n: object) -> bool:
        return n in self._parent

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._parent))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteTree) and self._parent == other._parent

    def __hash__(self) -> int:
        return hash(frozenset(self._parent.items()))

    def __repr__(self) -> str:
        return f"FiniteTree(root={self.root}, size={len(self)})"

    def parent_map(self) -> dict[int, Optional[int]]:
        return dict(self._parent)

    def parent(self, n: int) -> Optional[int]:
        self._check(n)
        return self._parent[n]

    def preorder(self) -> tuple[int, ...]:
        """Nodes in depth-first preorder, children by increasing id."""
        return self._order

    # -- queries ------------------------------------------------------
    def height(self, n: int) -> int:
        self._check(n)
        return self._depth[n]

    def ht(self) -> int:
        return self._sub_height[self.root]

    def successors(self, n: int) -> tuple[int, ...]:
        self._check(n)
        return self._children[n]

    def branching(self, n: int) -> int:
        return len(self.successors(n))

    def leaves(self) -> frozenset[int]:
        return frozenset(n for n, c in self._children.items() if not c)

    def is_leq(self, n: int, m: int) -> bool:
        self._check(n)
        self._check(m)
        return self._tin[n] <= self._tin[m] < self._tout[n]

    def interval(self, n: int) -> tuple[int, int]:
        """Preorder entry/exit times; m is above n iff its entry lies in n's interval."""
        self._check(n)
        return self._tin[n], self._tout[n]

    def comparable(self, n: int, m: int) -> bool:
        return self.is_leq(n, m) or self.is_leq(m, n)

    def ancestors(self, n: int) -> list[int]:
        """The chain from the root up to and including ``n``."""
        self._check(n)
        out = []
        x: Optional[int] = n
        while x is not None:
            out.append(x)
            x = self._parent[x]
        out.reverse()
        return out

    def descendants(self, n: int) -> list[int]:
        """Nodes ``m`` with ``n ⪯ m`` in preorder."""
        self._check(n)
        lo = self._tin[n]
        return list(self._order[lo:self._tout[n]])

    def subtree_height(self, n: int) -> int:
        self._check(n)
        return self._sub_height[n]

    def subtree_size(self, n: int) -> int:
        self._check(n)
        return self._sub_size[n]

    def subtree_leaves(self, n: int) -> int:
        self._check(n)
        return self._sub_leaves[n]

    def subtree(self, n: int) -> "FiniteTree":
        nodes = self.descendants(n)
        pm = {m: self._parent[m] for m in nodes}
        pm[n] = None
        return FiniteTree(pm)

    def components(self) -> list["FiniteTree"]:
        return [self.subtree(c) for c in self._children[self.root]]

    def induced(self, nodes: Iterable[int]) -> "FiniteTree":
        """Restrict the order to ``nodes``; the set must have a least element."""
        keep = set(nodes)
        for n in keep:
            self._check(n)
        pm: dict[int, Optional[int]] = {}
        for n in keep:
            p = self._parent[n]
            while p is not None and p not in keep:
                p = self._parent[p]
            pm[n] = p
        return FiniteTree(pm)


def build_from_parent_list(events: Sequence[tuple[int, Optional[int]]]) -> FiniteTree:
    """Build a tree from ``(node, parent)`` events; the root uses parent ``None``.

    Parents must precede their children.
    """
    pm: dict[int, Optional[int]] = {}
    root_seen = False
    for node, par in events:
        if node in pm:
            raise DuplicateNode(f"node {node} added twice")
        if par is None:
            if root_seen:
                raise MultipleRoots(f"second root {node}")
            root_seen = True
        elif par not in pm:
            raise OrphanParent(f"parent {par} of {node} not yet present")
        pm[node] = par
    if not root_seen:
        raise ParseError("no root event")
    return FiniteTree(pm)


def chain(n: int, start: int = 0) -> FiniteTree:
    """Chain ``start ≺ start+1 ≺ … ≺ start+n-1``."""
    pm: dict[int, Optional[int]] = {start: None}
    for i in range(1, n):
        pm[start + i] = start + i - 1
    return FiniteTree(pm)


def star(k: int) -> FiniteTree:
    """Root 0 with leaf children 1..k."""
    pm: dict[int, Optional[int]] = {0: None}
    for i in range(1, k + 1):
        pm[i] = 0
    return FiniteTree(pm)


# ---------------------------------------------------------------------------
# component kinds


class ComponentKind(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    OTHER = "Other"


def classify_component(t: FiniteTree) -> ComponentKind:
    r = t.root
    kids = t.successors(r)
    leaf_kids = [c for c in kids if not t.successors(c)]
    if len(t) == 4 and len(kids) == 2 and len(leaf_kids) == 1:
        other = kids[0] if kids[1] == leaf_kids[0] else kids[1]
        (g,) = t.successors(other) or (None,)
        if g is not None and len(t.successors(other)) == 1 and not t.successors(g):
            return ComponentKind.B
    if len(kids) == len(leaf_kids) == len(t) - 1:
        return {2: ComponentKind.A, 3: ComponentKind.C, 4: ComponentKind.D}.get(
            len(kids), ComponentKind.OTHER)
    return ComponentKind.OTHER


def shape(kind: ComponentKind, start: int = 0) -> FiniteTree:
    """A canonical tree of the given kind with ids ``start, start+1, …``."""
    s = start
    if kind is ComponentKind.B:
        return FiniteTree({s: None, s + 1: s, s + 2: s, s + 3: s + 2})
    width = {ComponentKind.A: 2, ComponentKind.C: 3, ComponentKind.D: 4}.get(kind)
    if width is None:
        raise ValueError("no canonical shape for Other")
    pm: dict[int, Optional[int]] = {s: None}
    for i in range(1, width + 1):
        pm[s + i] = s
    return FiniteTree(pm)


# ---------------------------------------------------------------------------
# stagewise presentations


@dataclass(frozen=True)
class GroundTruth:
    """Declared limit facts a generator knows about its presentation.

    ``infinite_nodes`` lists nodes (inside the horizon) whose subtree is
    infinite in the limit.  ``is_infinite`` may replace the finite set with a
    predicate when the family is not finite (binary-string trees).
    """

    tree_type: int
    infinite_nodes: frozenset = frozenset()
    isolated_path: Optional[tuple] = None
    omega_nodes: frozenset = frozenset()
    maximal_infinite: Optional[int] = None
    is_infinite: Optional[Callable[[object], bool]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.tree_type not in (1, 2, 3):
            raise ValueError("tree_type must be 1, 2 or 3")
        declared = 1 if self.maximal_infinite is not None else (
            2 if self.isolated_path is not None else 3)
        if declared != self.tree_type:
            raise ValueError(
                f"declared type {self.tree_type} contradicts structural fields ({declared})")

    def infinite(self, n: object) -> bool:
        if self.is_infinite is not None:
            return self.is_infinite(n)
        return n in self.infinite_nodes


@dataclass(frozen=True)
class Event:
    node: int
    parent: Optional[int]
    below: Optional[int] = None  # existing child of ``parent`` the node is inserted under


class StagewiseTree:
    """A monotone sequence of finite trees, grouped into stages.

    Events append nodes as new leaves, or (with ``below``) insert a node
    between a parent and one of its current children.  Neither changes the
    order among existing nodes.
    """

    def __init__(self, metadata: Optional[GroundTruth] = None):
        self.stages: list[list[Event]] = [[]]
        self.metadata = metadata
        self._parent: dict[int, Optional[int]] = {}
        self._stage_of: dict[int, int] = {}
        self._children: dict[int, list[int]] = {}
        self._cache: dict[int, FiniteTree] = {}

    # -- construction -------------------------------------------------
    @property
    def horizon(self) -> int:
        return len(self.stages) - 1

    def new_stage(self) -> int:
        self.stages.append([])
        return self.horizon

    def add(self, node: int, parent: Optional[int], below: Optional[int] = None) -> None:
        if node in self._parent:
            raise DuplicateNode(f"node {node} added twice")
        if parent is None:
            if self._parent:
                raise MultipleRoots(f"second root {node}")
        elif parent not in self._parent:
            raise OrphanParent(f"parent {parent} of {node} not present")
        if below is not None:
            if self._parent.get(below) != parent:
                raise OrphanParent(f"{below} is not a child of {parent}")
            self._parent[below] = node
            self._children[parent].remove(below)
            self._children[node] = [below]
        else:
            self._children[node] = []
        self._parent[node] = parent
        if parent is not None:
            self._children[parent].append(node)
        self._stage_of[node] = self.horizon
        self.stages[-1].append(Event(node, parent, below))
        self._cache.pop(self.horizon, None)

    # -- live queries (current stage) ---------------------------------
    def __contains__(self, n: object) -> bool:
        return n in self._parent

    def __len__(self) -> int:
        return len(self._parent)

    def live_parent(self, n: int) -> Optional[int]:
        return self._parent[n]

    def live_children(self, n: int) -> list[int]:
        return self._children[n]

    def stage_of(self, n: int) -> int:
        """Stage at which ``n`` was added."""
        if n not in self._stage_of:
            raise UnknownNode(n)
        return self._stage_of[n]

    # -- snapshots ----------------------------------------------------
    def last_change(self, s: int) -> int:
        """Greatest stage ``t <= s`` with events (snapshots at s and t agree)."""
        t = min(s, self.horizon)
        while t > 0 and not self.stages[t]:
            t -= 1
        return t

    def freeze(self, s: Optional[int] = None) -> FiniteTree:
        """The finite tree T_s (defaults to the last stage)."""
        s = self.horizon if s is None else s
        if s < 0:
            raise ValueError("stage must be non-negative")
        t = self.last_change(s)
        if t not in self._cache:
            pm: dict[int, Optional[int]] = {}
            for stage in self.stages[: t + 1]:
                for ev in stage:
                    if ev.below is not None:
                        pm[ev.below] = ev.node
                    pm[ev.node] = ev.parent
            self._cache[t] = FiniteTree(pm)
        return self._cache[t]

    def events(self) -> Iterator[tuple[int, Event]]:
        for s, stage in enumerate(self.stages):
            for ev in stage:
                yield s, ev

    # -- treev1 -------------------------------------------------------
    def to_treev1(self) -> str:
        lines = []
        for s, stage in enumerate(self.stages):
            lines.append(f"# stage {s}")
            for ev in stage:
                par = "." if ev.parent is None else str(ev.parent)
                tail = "" if ev.below is None else f" {ev.below}"
                lines.append(f"{ev.node} {par}{tail}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_treev1(cls, text: str, metadata: Optional[GroundTruth] = None) -> "StagewiseTree":
        st = cls(metadata)
        first = True
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "stage":
                    if not first:
                        st.new_stage()
                    first = False
                continue
            first = False
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(f"line {lineno}: expected '<node> <parent>'")
            try:
                node = int(parts[0])
                par = None if parts[1] == "." else int(parts[1])
                below = int(parts[2]) if len(parts) == 3 else None
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
            st.add(node, par, below)
        return st

    @classmethod
    def from_tree(cls, t: FiniteTree, metadata: Optional[GroundTruth] = None) -> "StagewiseTree":
        """Single-stage presentation of a finite tree."""
        st = cls(metadata)
        for n in t.preorder():
            st.add(n, t.parent(n))
        return st


def tree_to_treev1(t: FiniteTree) -> str:
    return StagewiseTree.from_tree(t).to_treev1()


def tree_from_treev1(text: str) -> FiniteTree:
    return StagewiseTree.from_treev1(text).freeze()


def classify_tree_type(p: StagewiseTree) -> int:
    md = p.metadata
    if md is None:
        raise MissingMetadata("presentation carries no ground truth")
    if md.maximal_infinite is not None:
        return 1
    if md.isolated_path is not None:
        return 2
    return 3


# ---------------------------------------------------------------------------
# enumeration of small shapes


def _shapes(n: int, memo: dict[int, list[tuple]] = {}) -> list[tuple]:
    """Canonical forms (sorted tuples of child forms) of rooted trees with n nodes."""
    if n in memo:
        return memo[n]
    if n == 1:
        memo[1] = [()]
        return memo[1]
    out: set[tuple] = set()

    def parts(remaining: int, max_form: Optional[tuple], acc: list[tuple]) -> None:
        if remaining == 0:
            out.add(tuple(sorted(acc)))
            return
        for size in range(1, remaining + 1):
            for form in _shapes(size):
                if max_form is not None and (size, form) > max_form:
                    continue
                acc.append(form)
                parts(remaining - size, (size, form), acc)
                acc.pop()

    parts(n - 1, None, [])
    memo[n] = sorted(out)
    return memo[n]


def tree_from_form(form: tuple, start: int = 0) -> FiniteTree:
    """Materialize a canonical form with ids assigned in preorder from ``start``."""
    pm: dict[int, Optional[int]] = {}
    counter = [start]

    def walk(f: tuple, par: Optional[int]) -> None:
        me = counter[0]
        counter[0] += 1
        pm[me] = par
        for c in f:
            walk(c, me)

    walk(form, None)
    return FiniteTree(pm)


def all_rooted_trees(n: int) -> list[FiniteTree]:
    """Every rooted unlabeled tree with exactly n nodes, one representative each."""
    if n < 1:
        return []
    return [tree_from_form(f) for f in _shapes(n)]


def canonical_form(t: FiniteTree, n: Optional[int] = None) -> tuple:
    n = t.root if n is None else n
    return tuple(sorted(canonical_form(t, c) for c in t.successors(n)))


def isomorphic(a: FiniteTree, b: FiniteTree) -> bool:
    return len(a) == len(b) and canonical_form(a) == canonical_form(b)
