"""Builtin opponent programs and the adversary config format.

Config lines (``#`` starts a comment)::

    pair <e,i> tree=<name> map=<name> [key=value ...]
    enum <e> w=<name> [key=value ...]

``pair`` lines feed the type 1 construction and ``enum`` lines the
chain/antichain construction.  Keys not consumed by the named programs
are an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from ..errors import ParseError
from ..trees import ComponentKind
from .presented import KIND_SIG, SIG_B, SIG_C, SIG_D, PartialMap, PresentedTree, sig_size

# ---------------------------------------------------------------------------
# tree programs


class MirrorTree:
    """Replays our own tree ``delay`` stages late, with the same ids."""

    def __init__(self, delay: int = 2):
        if delay < 1:
            raise ValueError("delay must be at least 1")
        self.delay = delay
        self.name = f"mirror(delay={delay})"

    def events(self, s, ours):
        return ours.stage_events(s - self.delay) if s >= self.delay else ()


class _Builder:
    def __init__(self):
        self.next = 0

    def node(self, out: list, parent: Optional[int]) -> int:
        x = self.next
        self.next += 1
        out.append((x, parent))
        return x

    def sub(self, out: list, comp: int, kind: ComponentKind) -> None:
        sig = KIND_SIG[kind]
        out.append((self.next, comp, sig))
        self.next += sig_size(sig)


class PumpTree:
    """Two components that each gain a D tree at every stage.

    The first starts with ``start`` D trees, the second with one more, so
    a shift-by-one map embeds the first into the second forever.
    """

    def __init__(self, start: int = 2):
        self.start = start
        self.name = f"pump(start={start})"
        self._b = _Builder()
        self._comps: list[int] = []

    def events(self, s, ours):
        out: list = []
        if s == 0:
            root = self._b.node(out, None)
            for extra in (0, 1):
                c = self._b.node(out, root)
                self._comps.append(c)
                self._b.sub(out, c, ComponentKind.B)
                for _ in range(self.start + extra):
                    self._b.sub(out, c, ComponentKind.D)
        else:
            for c in self._comps:
                self._b.sub(out, c, ComponentKind.D)
        return out


class EmptyTree:
    """A lone root."""

    name = "empty"

    def events(self, s, ours):
        return [(0, None)] if s == 0 else ()


class TallTree:
    """A chain of six nodes, too tall to be a copy of T."""

    name = "tall"

    def events(self, s, ours):
        return [(0, None)] + [(i, i - 1) for i in range(1, 6)] if s == 0 else ()


# ---------------------------------------------------------------------------
# map programs


class EmptyMap:
    name = "empty"

    def advance(self, s, view, f):
        pass


class IdentityMap:
    """x -> x on every present node."""

    name = "identity"

    def __init__(self):
        self._cursor = 0

    def advance(self, s, view, f):
        for i in range(self._cursor, len(view.log_node)):
            x = view.log_node[i]
            f.define_block(x, x, view.log_len[i])
        self._cursor = len(view.log_node)


# preference order when a fresh small tree picks a target shape
_RANK = {SIG_B: 0, SIG_D: 1, SIG_C: 2, KIND_SIG[ComponentKind.A]: 3}


class ShiftMap:
    """Sends a component with k D trees into the least one with k + shift.

    Values are extended greedily as either side grows and are never
    changed; a node that cannot be placed stays undefined.
    """

    def __init__(self, shift: int = 1):
        self.shift = shift
        self.name = f"shift({shift})"
        self._cursor = 0
        self.target: dict[int, int] = {}
        self._sources: dict[int, set[int]] = {}
        self._pending: set[int] = set()

    def advance(self, s, view: PresentedTree, f: PartialMap):
        work = set(self._pending)
        for c in view.changed[self._cursor:]:
            work.add(c)
            work |= self._sources.get(c, set())
        self._cursor = len(view.changed)
        self._pending = set()
        for c in sorted(work):
            if not view.is_component(c):
                continue
            t = self.target.get(c)
            if t is None:
                t = view.component_with_dcount(view.dcount(c) + self.shift)
                if t is None or t == c:
                    self._pending.add(c)
                    continue
                self.target[c] = t
                self._sources.setdefault(t, set()).add(c)
            self._extend(c, t, view, f)

    def _extend(self, c: int, t: int, view: PresentedTree, f: PartialMap) -> None:
        if f.get(c) is None:
            f.define(c, t)
        subs = view.comp_subs[c]
        used = set()
        fresh = []
        for x in subs:
            y = f.get(x)
            if y is None:
                fresh.append(x)
                continue
            y = view.sub_containing(y)
            used.add(y)
            m = _sub_embedding(view, x, y, f)
            if m:
                for a, b in m.items():
                    f.define(a, b)
        if not fresh:
            return
        free: dict[tuple, list[int]] = {}
        for y in reversed(view.comp_subs[t]):
            if y not in used:
                free.setdefault(view.sub_sig[y], []).append(y)
        fresh.sort(key=lambda x: (_RANK.get(view.sub_sig[x], 4), x))
        for x in fresh:
            sig = view.sub_sig[x]
            for tsig in sorted(free, key=lambda g: (g != sig, len(g), g)):
                if not free[tsig]:
                    continue
                y = free[tsig][-1]
                if tsig == sig and view.contiguous(x) and view.contiguous(y):
                    f.define_block(x, y, view.sub_size(x))
                else:
                    m = _sub_embedding(view, x, y, f)
                    if m is None:
                        continue
                    for a, b in m.items():
                        f.define(a, b)
                free[tsig].pop()
                break


def _sub_embedding(view: PresentedTree, x: int, y: int, f: PartialMap) -> Optional[dict[int, int]]:
    """Embed the small tree at x onto the one at y, root to root, keeping existing values."""
    if f.get(x) not in (None, y):
        return None
    out = {x: y}
    kids = view.sub_kids[x]
    tkids = view.sub_kids[y]
    g = {k: view.l3_kids.get(k, []) for k in kids}
    tg = {k: view.l3_kids.get(k, []) for k in tkids}
    taken = {f.get(k) for k in kids if f.get(k) is not None}
    order = sorted(kids, key=lambda k: (f.get(k) is None, -len(g[k]), k))
    for k in order:
        img = f.get(k)
        if img is None:
            cands = [z for z in tkids if z not in taken and len(tg[z]) >= len(g[k])]
            if not cands:
                return None
            img = min(cands, key=lambda z: (len(tg[z]), z))
            taken.add(img)
        elif img not in tg or len(tg[img]) < len(g[k]):
            return None
        out[k] = img
        used = {f.get(q) for q in g[k] if f.get(q) is not None}
        free = [z for z in tg[img] if z not in used]
        for q in g[k]:
            if f.get(q) is not None:
                if f.get(q) not in tg[img]:
                    return None
                out[q] = f.get(q)
            else:
                if not free:
                    return None
                out[q] = free.pop(0)
    return out


# ---------------------------------------------------------------------------
# enumerators for the chain/antichain construction


class Enumerator:
    """W_e: reads the current tree and the stage, returns new members."""

    name = "enum"

    def step(self, s: int, tree) -> Iterable[int]:
        return ()


class EmptyEnum(Enumerator):
    name = "empty"


class BranchEnum(Enumerator):
    """Every node on the leftmost (or rightmost) branch, from stage ``start`` on."""

    def __init__(self, side: str = "left", start: int = 0):
        if side not in ("left", "right"):
            raise ValueError("side must be left or right")
        self.side = side
        self.start = start
        self.name = f"{side}-branch(start={start})"

    def step(self, s, tree):
        if s < self.start:
            return ()
        x = tree.root
        out = [x]
        while tree.children(x):
            kids = tree.children(x)
            x = min(kids) if self.side == "left" else max(kids)
            out.append(x)
        return out


class LeavesEnum(Enumerator):
    """All current leaves, from stage ``start`` on."""

    def __init__(self, start: int = 0):
        self.start = start
        self.name = f"leaves(start={start})"

    def step(self, s, tree):
        return tree.leaves() if s >= self.start else ()


class NewestEnum(Enumerator):
    """The most recently added node at every stage."""

    name = "newest"

    def step(self, s, tree):
        return (tree.newest,) if tree.newest is not None else ()


# ---------------------------------------------------------------------------
# config


TREES: dict[str, Callable[..., object]] = {
    "mirror": MirrorTree, "pump": PumpTree, "empty": EmptyTree, "tall": TallTree}
MAPS: dict[str, Callable[..., object]] = {
    "shift": ShiftMap, "identity": IdentityMap, "empty": EmptyMap}
ENUMS: dict[str, Callable[..., Enumerator]] = {
    "empty": EmptyEnum, "branch": BranchEnum, "leaves": LeavesEnum, "newest": NewestEnum}

PARAMS = {
    "mirror": {"delay": int}, "pump": {"start": int}, "empty": {}, "tall": {},
    "shift": {"shift": int}, "identity": {}, "branch": {"side": str, "start": int},
    "leaves": {"start": int}, "newest": {},
}


@dataclass
class AdversaryConfig:
    pairs: list  # AdversaryPair, in index order
    enums: list[Enumerator]


_PAIR = re.compile(r"^pair\s+<\s*(\d+)\s*,\s*(\d+)\s*>\s+(.*)$")
_ENUM = re.compile(r"^enum\s+(\d+)\s+(.*)$")


def _kv(text: str, lineno: int) -> dict[str, str]:
    out = {}
    for tok in text.split():
        if "=" not in tok:
            raise ParseError(f"line {lineno}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        if k in out:
            raise ParseError(f"line {lineno}: repeated key {k}")
        out[k] = v
    return out


def _make(table, kind: str, name: str, params: dict[str, str], lineno: int):
    if name not in table:
        raise ParseError(f"line {lineno}: unknown {kind} {name!r}")
    spec = PARAMS[name]
    kwargs = {}
    for k, v in list(params.items()):
        if k in spec:
            try:
                kwargs[k] = spec[k](v)
            except ValueError:
                raise ParseError(f"line {lineno}: bad value {v!r} for {k}") from None
            del params[k]
    try:
        return table[name](**kwargs)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"line {lineno}: {exc}") from None


def cantor(e: int, i: int) -> int:
    return (e + i) * (e + i + 1) // 2 + i


def parse_config(text: str) -> AdversaryConfig:
    from .isomaxinf import AdversaryPair

    pairs: dict[int, object] = {}
    enums: dict[int, Enumerator] = {}
    trees: dict[tuple, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _PAIR.match(line)
        if m:
            e, i = int(m.group(1)), int(m.group(2))
            kv = _kv(m.group(3), lineno)
            if "tree" not in kv or "map" not in kv:
                raise ParseError(f"line {lineno}: pair needs tree= and map=")
            tname, mname = kv.pop("tree"), kv.pop("map")
            tkeys = {k: kv[k] for k in PARAMS.get(tname, {}) if k in kv}
            key = (tname, tuple(sorted(tkeys.items())))
            if key not in trees:
                trees[key] = _make(TREES, "tree", tname, dict(tkeys), lineno)
            for k in tkeys:
                kv.pop(k)
            mp = _make(MAPS, "map", mname, kv, lineno)
            if kv:
                raise ParseError(f"line {lineno}: unused keys {sorted(kv)}")
            idx = cantor(e, i)
            if idx in pairs:
                raise ParseError(f"line {lineno}: pair <{e},{i}> declared twice")
            pairs[idx] = AdversaryPair(trees[key], mp, f"<{e},{i}>")
            continue
        m = _ENUM.match(line)
        if m:
            e = int(m.group(1))
            kv = _kv(m.group(2), lineno)
            if "w" not in kv:
                raise ParseError(f"line {lineno}: enum needs w=")
            w = _make(ENUMS, "enumerator", kv.pop("w"), kv, lineno)
            if kv:
                raise ParseError(f"line {lineno}: unused keys {sorted(kv)}")
            if e in enums:
                raise ParseError(f"line {lineno}: enum {e} declared twice")
            enums[e] = w
            continue
        raise ParseError(f"line {lineno}: cannot parse {line!r}")
    if enums and sorted(enums) != list(range(len(enums))):
        raise ParseError("enum indices must be 0..n-1")
    return AdversaryConfig([pairs[k] for k in sorted(pairs)], [enums[k] for k in sorted(enums)])
