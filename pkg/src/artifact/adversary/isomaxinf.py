"""A type 1 tree whose computable copies have no computable nontrivial self-embedding.

Component T_s arrives at stage s with one A, one B and s D trees.  Each
opponent pair (tree program, map program) gets a strategy on a tree of
strategies with outcomes uinf < vinf < fin < triv.  A strategy looks for
components U, V of the opponent's tree with f embedding U into V, sets up
to diagonalize on T_u and T_v, and once U and V look like T_u and T_v it
changes the A of T_u into a tree that cannot map into the image of U's A.

The run returns the tree and a trace of ordered events per stage; the
audit in :mod:`.isomaxinf_audit` reads only the trace.
"""

from __future__ import annotations

import enum
from array import array
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Protocol, Sequence

from ..trees import ComponentKind, FiniteTree, StagewiseTree
from .presented import KIND_SIG, SIG_KIND, PartialMap, PresentedTree, block_layout, sig_name


class Outcome(enum.IntEnum):
    UINF = 0
    VINF = 1
    FIN = 2
    TRIV = 3

    @property
    def label(self) -> str:
        return ("uinf", "vinf", "fin", "triv")[self]


LABEL = {o.label: o for o in Outcome}


def sid(path: Sequence[int]) -> str:
    return ".".join(Outcome(o).label for o in path)


def parse_sid(s: str) -> tuple[int, ...]:
    return tuple(LABEL[x] for x in s.split(".")) if s else ()


def lower_priority(beta: Sequence[int], alpha: Sequence[int]) -> bool:
    """beta properly extends alpha or lies to its right."""
    for x, y in zip(beta, alpha):
        if x != y:
            return x > y
    return len(beta) > len(alpha)


# ---------------------------------------------------------------------------
# our tree


@dataclass
class _Sub:
    kind: ComponentKind
    root: int
    kids: list[int]
    grand: dict[int, list[int]] = field(default_factory=dict)


class ComponentTree:
    """The tree T: a root with components T_0, T_1, … stored compactly.

    Node ids are dense and handed out as one more than the largest id so
    far.  Each stage keeps its event list, with whole small trees logged
    as block events, so a mirror opponent can replay any stage.
    """

    def __init__(self):
        self.parent = array("i")
        self.log: list[list[tuple]] = []
        self.roots: list[int] = []
        self.subs: list[list[_Sub]] = []
        self.kinds: list[Counter] = []

    def _new(self, p: int) -> int:
        x = len(self.parent)
        self.parent.append(p)
        return x

    @property
    def size(self) -> int:
        return len(self.parent)

    def begin_stage(self, s: int) -> None:
        assert s == len(self.log)
        self.log.append([])
        if s == 0:
            self.log[0].append((self._new(-1), None))

    def stage_events(self, s: int) -> list[tuple]:
        return self.log[s]

    def add_component(self) -> int:
        k = len(self.roots)
        self.roots.append(self._new(0))
        self.log[-1].append((self.roots[k], 0))
        self.subs.append([])
        self.kinds.append(Counter())
        self.add_sub(k, ComponentKind.A)
        self.add_sub(k, ComponentKind.B)
        for _ in range(k):
            self.add_sub(k, ComponentKind.D)
        return k

    def add_sub(self, k: int, kind: ComponentKind) -> None:
        r = self._new(self.roots[k])
        width = {ComponentKind.A: 2, ComponentKind.B: 2, ComponentKind.C: 3, ComponentKind.D: 4}[kind]
        sub = _Sub(kind, r, [self._new(r) for _ in range(width)])
        if kind is ComponentKind.B:
            sub.grand[sub.kids[1]] = [self._new(sub.kids[1])]
        self.subs[k].append(sub)
        self.kinds[k][kind] += 1
        self.log[-1].append((r, self.roots[k], KIND_SIG[kind]))

    def the_a(self, k: int) -> Optional[_Sub]:
        xs = [b for b in self.subs[k] if b.kind is ComponentKind.A]
        return xs[0] if xs else None

    def a_to_c(self, k: int) -> None:
        sub = self.the_a(k)
        x = self._new(sub.root)
        sub.kids.append(x)
        self.log[-1].append((x, sub.root))
        self._rekind(k, sub, ComponentKind.C)

    def a_to_b(self, k: int) -> None:
        sub = self.the_a(k)
        leaf = sub.kids[1]
        x = self._new(leaf)
        sub.grand[leaf] = [x]
        self.log[-1].append((x, leaf))
        self._rekind(k, sub, ComponentKind.B)

    def _rekind(self, k: int, sub: _Sub, kind: ComponentKind) -> None:
        self.kinds[k][sub.kind] -= 1
        self.kinds[k][kind] += 1
        sub.kind = kind

    def shape_counts(self, k: int) -> Counter:
        return Counter({KIND_SIG[kind]: n for kind, n in self.kinds[k].items() if n})

    def component(self, k: int) -> FiniteTree:
        pm: dict[int, Optional[int]] = {self.roots[k]: None}
        for sub in self.subs[k]:
            pm[sub.root] = self.roots[k]
            for c in sub.kids:
                pm[c] = sub.root
                for g in sub.grand.get(c, ()):
                    pm[g] = c
        return FiniteTree(pm)

    def to_stagewise(self, upto: Optional[int] = None) -> StagewiseTree:
        """The stagewise presentation; ``upto`` truncates to that stage."""
        last = len(self.log) - 1 if upto is None else upto
        p = StagewiseTree()
        for s in range(last + 1):
            if s:
                p.new_stage()
            for ev in self.log[s]:
                if len(ev) == 3:
                    for y, q in block_layout(ev[0], ev[2]):
                        p.add(y, ev[1] if q < 0 else q)
                else:
                    p.add(*ev)
        return p


# ---------------------------------------------------------------------------
# opponents


class TreeProgram(Protocol):
    name: str

    def events(self, s: int, ours: ComponentTree) -> Iterable[tuple[int, Optional[int]]]: ...


class MapProgram(Protocol):
    name: str

    def advance(self, s: int, view: PresentedTree, f: PartialMap) -> None: ...


@dataclass
class AdversaryPair:
    tree: TreeProgram
    map: MapProgram
    label: str = ""


# ---------------------------------------------------------------------------
# strategies


@dataclass
class StrategyState:
    a: int
    b: Optional[int] = None  # None stands for infinity
    U: Optional[int] = None
    V: Optional[int] = None
    u: Optional[int] = None
    v: Optional[int] = None
    step: int = 1
    setup: Optional[tuple[int, int]] = None
    succeeded: bool = False


@dataclass
class RunResult:
    tree: ComponentTree
    header: dict
    trace: list[dict]
    states: dict[str, StrategyState]
    views: dict[str, PresentedTree]

    def records(self) -> list[dict]:
        return [self.header] + self.trace


class _Run:
    def __init__(self, pairs: Sequence[AdversaryPair], horizon: int, fault: bool):
        self.pairs = list(pairs)
        self.horizon = horizon
        self.fault = fault
        self.fault_target: Optional[int] = None
        self.fault_done = False
        self.t = ComponentTree()
        self.views: dict[int, PresentedTree] = {}
        self.maps: list[PartialMap] = []
        for i, pr in enumerate(self.pairs):
            key = id(pr.tree)
            if key not in self.views:
                self.views[key] = PresentedTree(pr.tree.name)
            self.maps.append(PartialMap(self.views[key], f"{pr.map.name}[{i}]"))
        self.states: dict[tuple[int, ...], StrategyState] = {}
        self.events: list[dict] = []
        self.trace: list[dict] = []

    # -- bookkeeping --------------------------------------------------
    def emit(self, **ev) -> None:
        self.events.append(ev)

    def large(self) -> int:
        nums = [0]
        for st in self.states.values():
            nums += [x for x in (st.a, st.b, st.u, st.v) if x is not None]
        return 1 + max(nums)

    def write(self, who: str, k: int, op: str) -> None:
        {"add_A": lambda: self.t.add_sub(k, ComponentKind.A),
         "add_B": lambda: self.t.add_sub(k, ComponentKind.B),
         "A_to_C": lambda: self.t.a_to_c(k),
         "A_to_B": lambda: self.t.a_to_b(k)}[op]()
        self.emit(ev="write", who=who, k=k, op=op)

    # -- one stage ----------------------------------------------------
    def stage(self, s: int) -> None:
        self.events = []
        self.t.begin_stage(s)
        self.t.add_component()
        if self.fault_target is not None and not self.fault_done:
            self.write("injected", self.fault_target, "add_B")
            self.fault_done = True
        for pr in self.pairs:
            view = self.views[id(pr.tree)]
            if getattr(view, "_stage", -1) != s:
                view.apply(pr.tree.events(s, self.t))
                view._stage = s
        for pr, f in zip(self.pairs, self.maps):
            f.sync()
            pr.map.advance(s, f.view, f)
            f.sync()
        path: list[int] = []
        for level in range(min(s, len(self.pairs) - 1) + 1):
            path.append(self.act(tuple(path), s))
        last = tuple(path[:-1])
        dead = sorted((b for b in self.states if lower_priority(b, last)), key=lambda b: (len(b), b))
        for b in dead:
            del self.states[b]
        if dead:
            self.emit(ev="init", who=[sid(b) for b in dead])
        self.trace.append({
            "stage": s,
            "path": [Outcome(o).label for o in path],
            "events": self.events,
            "states": {sid(b): _state_json(st) for b, st in sorted(self.states.items())},
        })

    def act(self, beta: tuple[int, ...], s: int) -> int:
        who = sid(beta)
        st = self.states.get(beta)
        if st is None:
            st = self.states[beta] = StrategyState(a=self.large())
        bs = []
        for j, o in enumerate(beta):
            anc = self.states.get(beta[:j])
            if anc is None:
                continue
            if o == Outcome.VINF and anc.v is not None:
                bs.append(anc.v)
            if o == Outcome.UINF and anc.u is not None:
                bs.append(anc.u)
        st.b = min(bs) if bs else None
        step = st.step
        out = self._module(beta, who, st, s)
        self.emit(ev="act", who=who, step=step, outcome=Outcome(out).label)
        return out

    def _module(self, beta, who: str, st: StrategyState, s: int) -> int:
        i = len(beta)
        view = self.maps[i].view
        f = self.maps[i]
        below_b = (lambda n: True) if st.b is None else (lambda n: n < st.b)
        if view.broken is not None:
            return Outcome.TRIV
        if st.U is not None:
            if not (view.is_component(st.U) and view.is_component(st.V)):
                return Outcome.TRIV
            prev = (st.u, st.v)
            st.u, st.v = view.dcount(st.U), view.dcount(st.V)
            self.emit(ev="params", who=who, u=st.u, v=st.v)
        if st.step == 1:
            pick = self._search(view, f, st.a, below_b)
            if pick is None:
                return Outcome.TRIV
            st.U, st.V = pick
            st.u, st.v = view.dcount(st.U), view.dcount(st.V)
            self.emit(ev="pick", who=who, U=st.U, V=st.V)
            self.emit(ev="params", who=who, u=st.u, v=st.v)
            if st.u < st.v and below_b(st.v):
                self._setup(who, st)
            st.step = 2
            return Outcome.FIN
        if st.step == 4:
            if (st.u, st.v) == prev:
                return Outcome.FIN
            st.step = 2
            st.succeeded = False
        # Step 2
        if st.u > prev[0]:
            return Outcome.UINF
        if st.v > prev[1]:
            return Outcome.VINF
        if not (st.u < st.v and below_b(st.v)):
            return Outcome.FIN
        self._setup(who, st)
        if (st.u < len(self.t.roots) and st.v < len(self.t.roots)
                and view.shape_counts(st.U) == self.t.shape_counts(st.u)
                and view.shape_counts(st.V) == self.t.shape_counts(st.v)
                and f.embeds(st.U, st.V)):
            self._diagonalize(who, st, view, f)
            st.step = 4
        return Outcome.FIN

    def _search(self, view: PresentedTree, f: PartialMap, a: int, below_b) -> Optional[tuple[int, int]]:
        for u in view.components():
            if view.dcount(u) <= a or not f.total_on(u):
                continue
            v = view.comp_of(f.get(u))
            if v is None or v == u or not view.is_component(v) or not below_b(view.dcount(v)):
                continue
            if f.embeds(u, v):
                return u, v
        return None

    def _setup(self, who: str, st: StrategyState) -> None:
        if st.setup == (st.u, st.v):
            return
        n = len(self.t.roots)
        if st.u >= n or st.v >= n:
            return  # T_u or T_v does not exist yet; retry at a later stage
        if self.t.the_a(st.u) is None:
            self.write(who, st.u, "add_A")
        if self.t.the_a(st.v) is not None:
            self.write(who, st.v, "A_to_C")
        st.setup = (st.u, st.v)
        self.emit(ev="setup", who=who, u=st.u, v=st.v)
        if self.fault and self.fault_target is None:
            self.fault_target = st.v

    def _diagonalize(self, who: str, st: StrategyState, view: PresentedTree, f: PartialMap) -> None:
        ours = [x for x in view.comp_subs[st.U] if view.sub_sig[x] == KIND_SIG[ComponentKind.A]]
        target = view.sub_containing(f.get(ours[0])) if len(ours) == 1 else None
        tsig = view.sub_sig.get(target, ()) if target is not None else ()
        kind = SIG_KIND.get(tsig)
        new = {ComponentKind.B: "C", ComponentKind.C: "B", ComponentKind.D: "B"}.get(kind)
        self.emit(ev="diag", who=who, k=st.u, designated=sig_name(tsig),
                  designated_sig=list(tsig), new=new)
        if new is None:
            return
        self.write(who, st.u, "A_to_C" if new == "C" else "A_to_B")
        st.succeeded = True


def _state_json(st: StrategyState) -> dict:
    d = asdict(st)
    d["setup"] = list(st.setup) if st.setup else None
    return d


def isomaxinf_run(pairs: Sequence[AdversaryPair], horizon: int, fault: bool = False) -> RunResult:
    """Run the construction against ``pairs`` for stages 0..horizon.

    ``fault`` is a test hook: right after the first setup, an outside
    writer adds a B tree to the protected T_v.
    """
    if not pairs:
        pairs = []
    run = _Run(pairs, horizon, fault)
    for s in range(horizon + 1):
        if run.pairs:
            run.stage(s)
        else:
            run.events = []
            run.t.begin_stage(s)
            run.t.add_component()
            run.trace.append({"stage": s, "path": [], "events": [], "states": {}})
    header = {
        "kind": "isomaxinf",
        "horizon": horizon,
        "pairs": [p.label or f"{p.tree.name}/{p.map.name}" for p in run.pairs],
        "fault": fault,
    }
    views = {}
    for i, p in enumerate(run.pairs):
        views[p.label or str(i)] = run.views[id(p.tree)]
    return RunResult(run.t, header, run.trace,
                     {sid(b): st for b, st in run.states.items()}, views)
