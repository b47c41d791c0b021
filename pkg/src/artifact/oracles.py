"""Mock c.e. sets, enumeration families and the approximation stack f, g, h, a.

Every "infinite" set is a periodic generator, so all limits settle at a stage
computable from the declaration.  Limits are then reported from the
declaration and cross-checked against simulation.
"""

from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import HorizonTooSmall, MissingMetadata, OracleFailure, ParseError


# ---------------------------------------------------------------------------
# single sets


class MockCeSet:
    """A c.e. set given by (element, stage) events; K_s holds events at stages <= s."""

    def __init__(self, events: Iterable[tuple[int, int]] = (), declared_complete: bool = True):
        evs = sorted(((int(x), int(t)) for x, t in events), key=lambda e: (e[1], e[0]))
        seen: set[int] = set()
        for x, t in evs:
            if x in seen:
                raise ParseError(f"element {x} enumerated twice")
            if x < 0 or t < 0:
                raise ParseError("elements and stages must be natural numbers")
            seen.add(x)
        self.events: tuple[tuple[int, int], ...] = tuple(evs)
        self.declared_complete = declared_complete
        self._stage = {x: t for x, t in evs}

    def stage_of(self, x: int) -> Optional[int]:
        return self._stage.get(x)

    def members(self) -> frozenset[int]:
        return frozenset(self._stage)

    def at(self, s: int) -> frozenset[int]:
        return frozenset(x for x, t in self.events if t <= s)

    def contains(self, x: int, s: Optional[int] = None) -> bool:
        t = self._stage.get(x)
        return t is not None and (s is None or t <= s)

    def last_event(self) -> int:
        return self.events[-1][1] if self.events else 0

    def entering_at(self, s: int) -> list[int]:
        return [x for x, t in self.events if t == s]

    def to_text(self) -> str:
        return "".join(f"stage {t} elem {x}\n" for x, t in self.events)

    @classmethod
    def from_text(cls, text: str) -> "MockCeSet":
        evs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4 or parts[0] != "stage" or parts[2] != "elem":
                raise ParseError(f"line {lineno}: expected 'stage <s> elem <x>'")
            try:
                evs.append((int(parts[3]), int(parts[1])))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
        return cls(evs)


def ce_prefix(k: MockCeSet, s: int, n: int) -> frozenset[int]:
    """K_s[n] = elements below n enumerated by stage s."""
    return frozenset(x for x, t in k.events if t <= s and x < n)


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class Periodic:
    offset: int
    period: int

    def fires(self, s: int) -> bool:
        return s >= self.offset and (s - self.offset) % self.period == 0

    def last_before(self, s: int) -> Optional[int]:
        """Greatest firing stage < s."""
        if s <= self.offset:
            return None
        return self.offset + ((s - 1 - self.offset) // self.period) * self.period


class CeFamily:
    """Uniform sequence A_0, A_1, … with exactly one event per stage >= 1.

    Finite sets list their stages; periodic sets fire every ``period`` stages
    from ``offset``.  Stages claimed by no declared set go to a filler set
    with index ``size`` which is infinite.
    """

    def __init__(self, finite: Optional[dict[int, Sequence[int]]] = None,
                 periodic: Optional[dict[int, tuple[int, int]]] = None):
        finite = {int(k): sorted(int(t) for t in v) for k, v in (finite or {}).items()}
        periodic = {int(k): Periodic(int(o), int(p)) for k, (o, p) in (periodic or {}).items()}
        if set(finite) & set(periodic):
            raise ParseError("a set is declared both finite and periodic")
        for p in periodic.values():
            if p.offset < 1 or p.period < 1:
                raise ParseError("periodic offset and period must be positive")
        self.finite = finite
        self.periodic = periodic
        declared = set(finite) | set(periodic)
        self.size = max(declared) + 1 if declared else 0
        for i in range(self.size):
            if i not in declared:
                self.finite[i] = []
        self.filler = self.size
        owner: dict[int, int] = {}
        for i, stages in self.finite.items():
            for t in stages:
                if t < 1:
                    raise ParseError("events occur at stages >= 1")
                if t in owner:
                    raise ParseError(f"stage {t} claimed by sets {owner[t]} and {i}")
                owner[t] = i
        self._finite_owner = owner
        self._cache_last: dict[tuple[int, int], Optional[int]] = {}

    # -- schedule ---------------------------------------------------------
    def who(self, s: int) -> Optional[int]:
        """Index of the set receiving an element at stage s (None at stage 0)."""
        if s < 1:
            return None
        hits = [i for i, p in self.periodic.items() if p.fires(s)]
        if s in self._finite_owner:
            hits.append(self._finite_owner[s])
        if len(hits) > 1:
            raise OracleFailure(f"stage {s} claimed by sets {sorted(hits)}")
        return hits[0] if hits else self.filler

    def is_finite(self, i: int) -> bool:
        return i in self.finite or i > self.filler

    def last_event_before(self, i: int, s: int) -> Optional[int]:
        """Greatest stage < s at which A_i received an element."""
        if i in self.finite:
            st = self.finite[i]
            k = bisect.bisect_left(st, s)
            return st[k - 1] if k else None
        if i in self.periodic:
            return self.periodic[i].last_before(s)
        if i == self.filler:
            key = (i, s)
            if key not in self._cache_last:
                t = s - 1
                while t >= 1 and self.who(t) != i:
                    t -= 1
                self._cache_last[key] = t if t >= 1 else None
            return self._cache_last[key]
        return None

    def has_event_after(self, i: int, stage: int) -> bool:
        if i in self.finite:
            return any(t > stage for t in self.finite[i])
        return i <= self.filler

    def last_finite_event(self, n: int) -> int:
        """Max over the finite sets among A_0..A_n of their last event stage."""
        best = 0
        for j in range(n + 1):
            if j in self.finite and self.finite[j]:
                best = max(best, self.finite[j][-1])
        return best

    def stabilization_stage(self, n: int) -> int:
        """A stage after which every infinite set among A_0..A_n has fired past the finite ones."""
        u0 = self.last_finite_event(n)
        u1 = u0
        for j in range(n + 1):
            if self.is_finite(j):
                continue
            if j in self.periodic:
                p = self.periodic[j]
                first = max(p.offset, u0 + 1)
                first = p.offset + -(-(first - p.offset) // p.period) * p.period
                u1 = max(u1, first)
            else:
                t = u0 + 1
                while self.who(t) != j:
                    t += 1
                u1 = max(u1, t)
        return u1

    # -- text format ------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        for i in sorted(self.finite):
            lines.append(f"finite {i}")
        for i in sorted(self.periodic):
            p = self.periodic[i]
            lines.append(f"periodic {i} {p.offset} {p.period}")
        for t in sorted(self._finite_owner):
            lines.append(f"stage {t} set {self._finite_owner[t]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CeFamily":
        finite: dict[int, list[int]] = {}
        periodic: dict[int, tuple[int, int]] = {}
        pending: list[tuple[int, int]] = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "finite" and len(parts) >= 2:
                    finite.setdefault(int(parts[1]), []).extend(int(x) for x in parts[2:])
                elif parts[0] == "periodic" and len(parts) == 4:
                    periodic[int(parts[1])] = (int(parts[2]), int(parts[3]))
                elif parts[0] == "stage" and len(parts) == 4 and parts[2] == "set":
                    pending.append((int(parts[3]), int(parts[1])))
                else:
                    raise ParseError(f"line {lineno}: unrecognised '{line}'")
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
        for i, t in pending:
            if i in periodic:
                raise ParseError(f"explicit event for periodic set {i}")
            finite.setdefault(i, []).append(t)
        return cls(finite, periodic)


# ---------------------------------------------------------------------------
# approximation stack


@dataclass
class StackTruth:
    f: list[int]
    h: list[int]
    a: list[int]


class ApproxStack:
    """Memoized evaluators f(n,s), g(n,s), h(n,s), a(n,s) for n <= n_max.

    g is filled stage by stage, since g(n+1,s) depends on all earlier stages.
    """

    def __init__(self, family: CeFamily, k_set: Optional[MockCeSet] = None, n_max: int = 4):
        self.family = family
        self.k = k_set or MockCeSet()
        self.n_max = n_max
        self._f: dict[tuple[int, int], int] = {}
        self._g: list[tuple[int, ...]] = []
        self._counts: list[Counter] = [Counter() for _ in range(n_max + 1)]

    # -- f ----------------------------------------------------------------
    def f_stage(self, n: int, s: int) -> int:
        key = (n, s)
        hit = self._f.get(key)
        if hit is None:
            hit = self._f[key] = self._compute_f(n, s)
        return hit

    def _compute_f(self, n: int, s: int) -> int:
        fam = self.family
        last = [fam.last_event_before(j, s + 1) for j in range(n + 1)]
        if all(t is None for t in last):
            return 0
        i = fam.who(s)
        if i is None or i > n:
            return max(t for t in last if t is not None)
        t = fam.last_event_before(i, s) or 0
        inside = set()
        for j in range(n + 1):
            lj = last[j]
            if lj is not None and lj > t:
                inside.add(j)
        if len(inside) == n + 1:
            return 0
        outside = [last[j] for j in range(n + 1) if j not in inside and last[j] is not None]
        return max(outside, default=0)

    def f_true(self, n: int) -> int:
        return self.family.last_finite_event(n)

    # -- g ----------------------------------------------------------------
    def _extend_g(self, s: int) -> None:
        while len(self._g) <= s:
            t = len(self._g)
            row = [self.f_stage(0, t)]
            for n in range(self.n_max):
                prefix = tuple(row)
                k = self._counts[n][prefix]
                self._counts[n][prefix] += 1
                row.append(self.f_stage(n + 1, k + max(row)))
            self._counts[self.n_max][tuple(row)] += 1
            self._g.append(tuple(row))

    def g_stage(self, n: int, s: int) -> int:
        if n > self.n_max:
            raise ValueError(f"n={n} exceeds the stack depth {self.n_max}")
        self._extend_g(s)
        return self._g[s][n]

    def g_row(self, s: int) -> tuple[int, ...]:
        self._extend_g(s)
        return self._g[s]

    # -- h, a -------------------------------------------------------------
    def h_stage(self, n: int, s: int) -> int:
        """Least t <= s with K_t[n+1] = K_s[n+1]: the last entry of an element <= n."""
        best = 0
        for x, t in self.k.events:
            if t > s:
                break
            if x <= n:
                best = t
        return best

    def h_true(self, n: int) -> int:
        return max((t for x, t in self.k.events if x <= n), default=0)

    def a_stage(self, n: int, s: int) -> int:
        return max(self.g_stage(n, s), self.h_stage(n, s))

    def a_true(self, n: int) -> int:
        return max(self.f_true(n), self.h_true(n))

    def truth(self) -> StackTruth:
        r = range(self.n_max + 1)
        return StackTruth([self.f_true(n) for n in r], [self.h_true(n) for n in r],
                          [self.a_true(n) for n in r])

    def stabilization_stage(self) -> int:
        return max(self.family.stabilization_stage(self.n_max), self.k.last_event())

    def require_horizon(self, horizon: int) -> None:
        s = self.stabilization_stage()
        if s > horizon:
            raise HorizonTooSmall(f"limits settle at stage {s} > horizon {horizon}")

    # -- empirical checks -------------------------------------------------
    def tail_min(self, fn: str, n: int, horizon: int, start: Optional[int] = None) -> int:
        """Minimum of ``fn(n, ·)`` over the tail window, the horizon reading of liminf."""
        self.require_horizon(horizon)
        start = max(self.stabilization_stage(), horizon // 2) if start is None else start
        ev = getattr(self, f"{fn}_stage")
        return min(ev(n, t) for t in range(start, horizon + 1))

    def threshold(self, fn: str, n: int, k: int, horizon: int, truth: int) -> Optional[int]:
        """Least s_k with fn(n,t) in {truth} ∪ (k, ∞) for all t in [s_k, horizon]."""
        ev = getattr(self, f"{fn}_stage")
        s_k = 0
        for t in range(horizon + 1):
            v = ev(n, t)
            if v != truth and v <= k:
                s_k = t + 1
        return s_k if s_k <= horizon else None

    def simultaneous_stages(self, n: int, horizon: int) -> list[int]:
        """Stages where g(i,s) = f(i) for every i <= n."""
        want = tuple(self.f_true(i) for i in range(n + 1))
        return [s for s in range(horizon + 1) if self.g_row(s)[: n + 1] == want]


# ---------------------------------------------------------------------------
# limit oracles


class LimitOracle:
    """Honest answers to limit questions about a presentation, read from its ground truth.

    Successor questions are answered from the frozen tree at the horizon.
    """

    def __init__(self, p):
        if p.metadata is None:
            raise MissingMetadata("presentation carries no ground truth")
        self.p = p
        self.md = p.metadata
        self.tree = p.freeze()

    def is_subtree_infinite(self, n) -> bool:
        return self.md.infinite(n)

    def successors(self, n):
        return self.tree.successors(n)

    def branching(self, n) -> int:
        return len(self.successors(n))

    def is_omega_node(self, n) -> bool:
        return n in self.md.omega_nodes

    def exists_extension(self, n, after_stage: int) -> bool:
        """Does some node above n appear after the given stage?"""
        if self.is_subtree_infinite(n):
            return True
        return any(self.p.stage_of(m) > after_stage for m in self.tree.descendants(n))

    def structural(self) -> "StructuralOracle":
        return StructuralOracle(self)


class StructuralOracle:
    """Restricted view exposing only the successor relation and branching function."""

    def __init__(self, full: LimitOracle):
        self._full = full

    def successors(self, n):
        return self._full.successors(n)

    def branching(self, n) -> int:
        return self._full.branching(n)

    def is_successor(self, m, n) -> bool:
        return n in self._full.successors(m)


def limit_oracle(p) -> LimitOracle:
    return LimitOracle(p)
