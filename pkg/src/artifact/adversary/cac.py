"""A binary branching tree with no c.e. infinite chain or antichain (finite injury).

R_{2e} keeps W_e from being an infinite chain: it opens a fresh pair of
leaves, restrains growth above one of them, and if W_e ever shows a node
above the restraint it moves the restraint to that node's sibling.  R_{2e+1}
copies the restraint and, if W_e shows a node above it, moves the
restraint onto that node so every later node is comparable with it.
Requirements past the supplied enumerators use the empty enumerator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..report import Check, check
from ..trees import StagewiseTree
from .programs import EmptyEnum, Enumerator


class CacTree:
    """The tree being built, with the queries enumerators may use."""

    def __init__(self):
        self.parent: dict[int, Optional[int]] = {0: None}
        self.kids: dict[int, list[int]] = {0: []}
        self.root = 0
        self.newest: Optional[int] = 0
        self.next_id = 1

    def children(self, x: int) -> list[int]:
        return self.kids[x]

    def leaves(self) -> list[int]:
        return sorted(x for x, k in self.kids.items() if not k)

    def __contains__(self, x: object) -> bool:
        return x in self.parent

    def leq(self, x: int, y: int) -> bool:
        while y is not None:
            if y == x:
                return True
            y = self.parent[y]
        return False

    def add_pair(self, a: int) -> tuple[int, int]:
        b, c = self.next_id, self.next_id + 1
        self.next_id += 2
        for x in (b, c):
            self.parent[x] = a
            self.kids[x] = []
            self.kids[a].append(x)
        self.newest = c
        return b, c


@dataclass
class Requirement:
    index: int
    r: Optional[int] = None
    started: bool = False
    succeeded: bool = False

    @property
    def kind(self) -> str:
        return "chain" if self.index % 2 == 0 else "antichain"


@dataclass
class CacResult:
    tree: StagewiseTree
    header: dict
    trace: list[dict]
    requirements: dict[int, Requirement] = field(default_factory=dict)
    w: dict[int, set[int]] = field(default_factory=dict)

    def records(self) -> list[dict]:
        return [self.header] + self.trace


def cac_build(adversaries: Sequence[Enumerator], horizon: int, fault: bool = False) -> CacResult:
    """Stages 0..horizon; ``fault`` makes one lower-priority pair ignore the restraint above it."""
    t = CacTree()
    p = StagewiseTree()
    p.add(0, None)
    reqs: dict[int, Requirement] = {}
    w: dict[int, set[int]] = {e: set() for e in range(len(adversaries))}
    trace: list[dict] = []
    fault_armed = fault
    empty = EmptyEnum()

    def enum(e: int) -> Enumerator:
        return adversaries[e] if e < len(adversaries) else empty

    for s in range(horizon + 1):
        if s:
            p.new_stage()
        events: list[dict] = [{"ev": "add", "who": -1, "node": 0, "parent": None}] if s == 0 else []
        fresh: dict[str, list[int]] = {}
        for e in range(len(adversaries)):
            new = sorted(set(enum(e).step(s, t)) - w[e])
            if new:
                w[e].update(new)
                fresh[str(e)] = new
        i = 0
        while True:
            rq = reqs.setdefault(i, Requirement(i))
            e = i // 2
            above = t.root if i == 0 else reqs[i - 1].r
            ended = False
            if i % 2 == 0:
                if not rq.started:
                    cands = [x for x in t.leaves() if t.leq(above, x)]
                    if fault_armed and i >= 2:
                        off = [x for x in t.leaves() if not t.leq(above, x)]
                        if off:
                            cands, fault_armed = off, False
                    a = cands[0]
                    b, c = t.add_pair(a)
                    p.add(b, a)
                    p.add(c, a)
                    events += [{"ev": "add", "who": i, "node": b, "parent": a},
                               {"ev": "add", "who": i, "node": c, "parent": a}]
                    rq.r, rq.started = b, True
                    events.append({"ev": "restrain", "who": i, "r": b, "why": "open"})
                    ended = True
                elif not rq.succeeded:
                    hits = sorted(x for x in w.get(e, ()) if x in t and t.leq(rq.r, x))
                    if hits:
                        x = hits[0]
                        z = t.parent[x]
                        y = next(q for q in t.kids[z] if q != x)
                        rq.r, rq.succeeded = y, True
                        events.append({"ev": "success", "who": i, "x": x})
                        events.append({"ev": "restrain", "who": i, "r": y, "why": "sibling"})
                        ended = True
            else:
                if not rq.started:
                    rq.r, rq.started = reqs[i - 1].r, True
                    events.append({"ev": "restrain", "who": i, "r": rq.r, "why": "copy"})
                    ended = True
                elif not rq.succeeded:
                    hits = sorted(x for x in w.get(e, ()) if x in t and t.leq(rq.r, x))
                    if hits:
                        rq.r, rq.succeeded = hits[0], True
                        events.append({"ev": "success", "who": i, "x": hits[0]})
                        events.append({"ev": "restrain", "who": i, "r": hits[0], "why": "member"})
                        ended = True
            if ended:
                dead = sorted(j for j in reqs if j > i)
                for j in dead:
                    del reqs[j]
                if dead:
                    events.append({"ev": "init", "who": dead})
                break
            i += 1
        trace.append({"stage": s, "events": events, "w": fresh})
    header = {"kind": "cac", "horizon": horizon,
              "adversaries": [a.name for a in adversaries], "fault": fault}
    return CacResult(p, header, trace, dict(reqs), w)


# ---------------------------------------------------------------------------
# audit


def cac_verify(records, requirements: Optional[int] = None) -> list[Check]:
    """Replay a trace and check branching, restraint discipline and each requirement's case.

    ``requirements`` defaults to two per declared enumerator.  A requirement
    without a success fails its case if some stage visited it (no higher
    priority requirement ended the stage first) while a member of its set
    already sat above its restraint.  A member that shows up right at the
    horizon is not held against it.
    """
    records = list(records)
    header = records[0] if records and "kind" in records[0] else {}
    stages = records[1:] if header else records
    n_req = 2 * len(header.get("adversaries", [])) if requirements is None else requirements
    parent: dict[int, Optional[int]] = {}
    kids: dict[int, list[int]] = {}
    added_at: dict[int, int] = {}
    restr: dict[int, int] = {}
    set_at: dict[int, int] = {}
    success: dict[int, tuple[int, int]] = {}
    w: dict[int, set[int]] = {}
    missed: dict[int, list[str]] = {}  # visited with a member in reach but did not act
    branching_bad, discipline_bad = [], []
    max_branch = 0

    def leq(x: int, y: Optional[int]) -> bool:
        while y is not None:
            if y == x:
                return True
            y = parent[y]
        return False

    for rec in stages:
        s = rec["stage"]
        for e, xs in rec.get("w", {}).items():
            w.setdefault(int(e), set()).update(xs)
        ender = next((ev["who"] for ev in rec["events"] if ev["ev"] == "restrain"), None)
        for i, r in restr.items():
            if i in success or (ender is not None and i >= ender):
                continue
            if any(leq(r, y) for y in w.get(i // 2, ()) if y in parent):
                missed.setdefault(i, []).append(f"R{i} passed over a W_{i // 2} member inside T({r}) at stage {s}")
        for ev in rec["events"]:
            kind = ev["ev"]
            if kind == "add":
                x, a, who = ev["node"], ev["parent"], ev["who"]
                parent[x] = a
                kids[x] = []
                added_at[x] = s
                if a is not None:
                    kids[a].append(x)
                    for j, r in restr.items():
                        if j < who and not leq(r, x):
                            discipline_bad.append(f"stage {s}: R{who} added {x} outside T(r{j} = {r})")
            elif kind == "restrain":
                restr[ev["who"]] = ev["r"]
                set_at[ev["who"]] = s
                missed.pop(ev["who"], None)
            elif kind == "success":
                success[ev["who"]] = (ev["x"], s)
            elif kind == "init":
                for j in ev["who"]:
                    restr.pop(j, None)
                    set_at.pop(j, None)
                    success.pop(j, None)
                    missed.pop(j, None)
        for x, k in kids.items():
            max_branch = max(max_branch, len(k))
            if len(k) not in (0, 2):
                branching_bad.append(f"stage {s}: node {x} has {len(k)} successors")

    out = [check("binary-branching", branching_bad, "claim:binary-branching", f"max branching {max_branch}"),
           check("restraint-discipline", discipline_bad, "claim:restraint")]
    case_bad, cases = [], []
    for i in range(n_req):
        e = i // 2
        if i not in restr:
            case_bad.append(f"R{i} has no restraint at the horizon")
            continue
        r = restr[i]
        members = w.get(e, set())
        if i in success:
            x, s0 = success[i]
            late = [y for y, t in added_at.items() if t > s0 and not leq(r, y)]
            if x not in members:
                case_bad.append(f"R{i}: witness {x} is not in W_{e}")
            if i % 2 == 0 and (leq(x, r) or leq(r, x)):
                case_bad.append(f"R{i}: restraint {r} is comparable with the witness {x}")
            if i % 2 == 1 and r != x:
                case_bad.append(f"R{i}: restraint {r} is not the witness {x}")
            if late:
                case_bad.append(f"R{i}: nodes {late[:3]} added after success outside T({r})")
            cases.append(f"R{i}:success")
        else:
            s0 = set_at[i]
            late = [y for y, t in added_at.items() if t > s0 and not leq(r, y)]
            if late:
                case_bad.append(f"R{i}: nodes {late[:3]} added after stage {s0} outside T({r})")
            case_bad += missed.get(i, [])[:1]
            cases.append(f"R{i}:stable")
    out.append(check("requirement-cases", case_bad, "claim:requirements-met", " ".join(cases)))
    return out
