"""Trace audit for the type 1 construction.

Everything here is recomputed from the trace records alone, so a JSON-lines
trace written by one process can be checked by another.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Optional

from ..embedding import NotFound, find_embedding
from ..report import Check, check
from ..trees import ComponentKind, shape
from .isomaxinf import LABEL, Outcome, lower_priority, parse_sid
from .presented import sig_tree

_OPS = {
    "add_A": ({}, {"A": 1}),
    "add_B": ({}, {"B": 1}),
    "A_to_C": ({"A": 1}, {"C": 1}),
    "A_to_B": ({"A": 1}, {"B": 1}),
}


def _split(records: list[dict]) -> tuple[dict, list[dict]]:
    if records and "kind" in records[0]:
        return records[0], records[1:]
    return {}, records


def component_audit(stages: list[dict]) -> list[str]:
    """At every stage T_i has at most one A, at least one B, exactly i D trees."""
    kinds: list[Counter] = []
    bad: list[str] = []
    for rec in stages:
        s = rec["stage"]
        kinds.append(Counter({"A": 1, "B": 1, "D": s}))
        touched = {s}
        for ev in rec["events"]:
            if ev["ev"] != "write":
                continue
            k = ev["k"]
            if k >= len(kinds):
                bad.append(f"stage {s}: write to T_{k} before it exists")
                continue
            need, give = _OPS[ev["op"]]
            for x, n in need.items():
                if kinds[k][x] < n:
                    bad.append(f"stage {s}: {ev['op']} on T_{k} without an A")
                kinds[k][x] -= n
            kinds[k].update(give)
            touched.add(k)
        for k in sorted(touched):
            c = kinds[k]
            if c["A"] > 1 or c["B"] < 1 or c["D"] != k or min(c.values()) < 0:
                bad.append(f"stage {s}: T_{k} has {dict(+c)}")
    return bad


def aprop1_audit(stages: list[dict]) -> list[str]:
    """a(beta) exceeds u(alpha) for alpha*vinf <= beta and v(alpha) for alpha*fin <= beta."""
    bad = []
    for rec in stages:
        states = rec["states"]
        path = [LABEL[x] for x in rec["path"]]
        for n in range(len(path)):
            beta = tuple(path[:n])
            st = states.get(_sid(beta))
            if st is None:
                continue
            bound = []
            for j, o in enumerate(beta):
                anc = states.get(_sid(beta[:j]))
                if anc is None:
                    continue
                if o == Outcome.VINF and anc["u"] is not None:
                    bound.append(anc["u"])
                if o == Outcome.FIN and anc["v"] is not None:
                    bound.append(anc["v"])
            if bound and not st["a"] > max(bound):
                bad.append(f"stage {rec['stage']}: a({_sid(beta) or 'root'}) = {st['a']} <= {max(bound)}")
    return bad


def _sid(path) -> str:
    return ".".join(Outcome(o).label for o in path)


def protection_audit(stages: list[dict]) -> list[str]:
    """No one but the owner writes to T_u / T_v between setup and a change of u / v or initialization."""
    guard: dict[tuple[str, str], int] = {}  # (owner, side) -> protected index
    bad = []
    for rec in stages:
        s = rec["stage"]
        for ev in rec["events"]:
            kind = ev["ev"]
            if kind == "setup":
                guard[(ev["who"], "u")] = ev["u"]
                guard[(ev["who"], "v")] = ev["v"]
            elif kind == "params":
                for side in ("u", "v"):
                    key = (ev["who"], side)
                    if key in guard and guard[key] != ev[side]:
                        del guard[key]
            elif kind == "init":
                dead = set(ev["who"])
                for key in [k for k in guard if k[0] in dead]:
                    del guard[key]
            elif kind == "write":
                for (owner, side), k in guard.items():
                    if k == ev["k"] and owner != ev["who"]:
                        bad.append(f"stage {s}: {ev['who'] or 'root'} wrote {ev['op']} to T_{k}, "
                                   f"protected by {owner or 'root'} ({side})")
    return bad


def stabilization_audit(stages: list[dict], horizon: int, margin: int) -> tuple[list[str], str]:
    """Components present by horizon - margin receive no write after it."""
    cut = horizon - margin
    last: dict[int, int] = {}
    for rec in stages:
        for ev in rec["events"]:
            if ev["ev"] == "write":
                last[ev["k"]] = rec["stage"]
    bad = [f"T_{k} changed at stage {t} > {cut}" for k, t in sorted(last.items()) if k <= cut and t > cut]
    latest = max(last.values(), default=0)
    return bad, f"last write at stage {latest}; {len(last)} components ever changed"


def diagonalization_audit(stages: list[dict]) -> tuple[list[str], int]:
    """The new kind of T_u's designated tree does not embed into V's designated tree."""
    bad = []
    fired = 0
    for rec in stages:
        for ev in rec["events"]:
            if ev["ev"] != "diag":
                continue
            fired += 1
            if ev["new"] is None:
                bad.append(f"stage {rec['stage']}: designated tree of V is {ev['designated']}, no move possible")
                continue
            src = shape(ComponentKind(ev["new"]))
            dst = sig_tree(tuple(ev["designated_sig"]))
            if find_embedding(src, dst) is not NotFound:
                bad.append(f"stage {rec['stage']}: {ev['new']} still embeds into {ev['designated']}")
            if find_embedding(src, dst, fixed={src.root: dst.root}) is not NotFound:
                bad.append(f"stage {rec['stage']}: {ev['new']} embeds root to root into {ev['designated']}")
    return bad, fired


def priority_audit(stages: list[dict]) -> list[str]:
    """After a stage, no strategy of lower priority than the last one to act keeps a state."""
    bad = []
    for rec in stages:
        if not rec["path"]:
            continue
        last = tuple(LABEL[x] for x in rec["path"][:-1])
        for name in rec["states"]:
            if lower_priority(parse_sid(name), last):
                bad.append(f"stage {rec['stage']}: {name} survived below {_sid(last) or 'root'}")
    return bad


def b_growth_audit(stages: list[dict]) -> tuple[list[str], str]:
    """On the final path, a finite b must grow over the second half of the run."""
    if not stages or not stages[-1]["path"]:
        return [], "no strategies"
    final = [LABEL[x] for x in stages[-1]["path"]]
    half = stages[len(stages) // 2:]
    bad, seen = [], 0
    for n in range(len(final)):
        name = _sid(final[:n])
        vals = [rec["states"][name]["b"] for rec in half if name in rec["states"]]
        finite = [b for b in vals if b is not None]
        if not finite:
            continue
        seen += 1
        if any(b is None for b in vals):
            continue  # b became infinite, which is growth
        if finite[-1] <= finite[0]:
            bad.append(f"b({name or 'root'}) stays at {finite[-1]} over stages {half[0]['stage']}..")
    return bad, f"{seen} strategies on the final path with finite b"


def isomaxinf_verify(records: Iterable[dict], margin: Optional[int] = None) -> list[Check]:
    """All per-stage audits; ``margin`` defaults to a tenth of the horizon."""
    header, stages = _split(list(records))
    horizon = header.get("horizon", stages[-1]["stage"] if stages else 0)
    margin = max(1, horizon // 10) if margin is None else margin
    out = [check("component-audit", component_audit(stages), "claim:component-shape")]
    out.append(check("aprop1", aprop1_audit(stages), "claim:large-a-bound"))
    out.append(check("setup-protection", protection_audit(stages), "claim:setup-protection"))
    bad, note = stabilization_audit(stages, horizon, margin)
    out.append(check("component-stabilization", bad, "claim:components-finite", note))
    bad, fired = diagonalization_audit(stages)
    out.append(check("step3-impossibility", bad, "claim:diagonalization", f"{fired} firings"))
    out.append(check("priority-reset", priority_audit(stages), "claim:initialization"))
    bad, note = b_growth_audit(stages)
    out.append(check("b-growth", bad, "claim:b-unbounded", note))
    return out
