"""Type 3 pipeline over subtrees of 2^{<omega}.

synthesize_type3 builds phi: 2^{<omega} -> T by splitting at infinite
branchings and precomposes it with an embedding of T into 2^{<omega}.
find_expanding_node and branching_walk then extract from any nontrivial
self-embedding a sequence c(n) that dominates the branching levels, and
decode_jump turns a dominating sequence into finiteness verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from ..binary import lcp, strict_prefix
from ..embedding import Embedding
from ..errors import EscapesHorizon, HorizonTooSmall, NoBranchingFound, NoGrowingNode, OracleFailure
from ..trees import FiniteTree


class StringMap:
    """A map on binary strings given by a function or a finite table."""

    def __init__(self, fn: Union[Callable[[str], str], Mapping[str, str]], name: str = "delta"):
        self.name = name
        if isinstance(fn, Mapping):
            table = dict(fn)

            def look(x: str) -> str:
                try:
                    return table[x]
                except KeyError:
                    raise EscapesHorizon(f"{name} is undefined on {x!r}", progress=x) from None

            self._fn = look
            self.table: Optional[dict[str, str]] = table
        else:
            self._fn = fn
            self.table = None

    def __call__(self, x: str) -> str:
        return self._fn(x)

    def power(self, k: int) -> "StringMap":
        def go(x: str) -> str:
            for _ in range(k):
                x = self._fn(x)
            return x
        return StringMap(go, f"{self.name}^{k}")

    def compose(self, first: "StringMap") -> "StringMap":
        """self after first."""
        return StringMap(lambda x: self._fn(first(x)), f"{self.name}.{first.name}")


def string_tree(strings: Iterable[str], ids: dict[str, int]) -> FiniteTree:
    """The finite tree on a set of strings under the prefix order.

    Ids come from (and are added to) the shared ``ids`` table so source and
    target trees agree on names.
    """
    pool = sorted(set(strings), key=lambda x: (len(x), x))
    members = set(pool)
    parent: dict[int, Optional[int]] = {}
    for x in pool:
        ids.setdefault(x, len(ids))
    for x in pool:
        p = None
        for i in range(len(x) - 1, -1, -1):
            if x[:i] in members:
                p = ids[x[:i]]
                break
        parent[ids[x]] = p
    return FiniteTree(parent)


def as_embedding(f: StringMap, domain: Iterable[str]) -> tuple[Embedding, dict[str, int]]:
    """Finite restriction of a string map, with the target closed under prefixes."""
    dom = sorted(set(domain), key=lambda x: (len(x), x))
    images = {x: f(x) for x in dom}
    ids: dict[str, int] = {}
    closure = {y[:i] for y in images.values() for i in range(len(y) + 1)}
    src = string_tree(dom, ids)
    tgt = string_tree(closure | set(dom), ids)
    return Embedding(src, tgt, {ids[x]: ids[y] for x, y in images.items()}), ids


# ---------------------------------------------------------------------------
# synthesis


@dataclass
class Type3Synthesis:
    alpha: StringMap
    phi: StringMap
    start: str  # phi of the empty string


def _split(oracle, n: str, max_len: int) -> tuple[str, str]:
    """Two incomparable extensions of n with infinite subtrees: the children
    of the first node above n with two infinite successors."""
    x = n
    while len(x) <= max_len:
        inf = [c for c in oracle.successors(x) if oracle.infinite(c)]
        if len(inf) >= 2:
            return inf[0], inf[1]
        if not inf:
            raise OracleFailure(f"node {x!r} has no infinite successor")
        x = inf[0]
    raise HorizonTooSmall(f"no infinite branching above {n!r} below length {max_len}")


def synthesize_type3(oracle, beta: Optional[StringMap] = None, max_len: int = 100_000) -> Type3Synthesis:
    """alpha = phi after beta.

    ``oracle`` answers ``infinite(x)`` and ``successors(x)`` for the tree.
    ``beta`` embeds the tree into 2^{<omega}; it defaults to inclusion,
    which is an embedding whenever the tree already consists of strings.
    """
    start = next((c for c in ("0", "1") if oracle.infinite(c)), None)
    if start is None:
        raise OracleFailure("the root has no infinite successor")
    memo: dict[str, str] = {"": start}

    def phi(rho: str) -> str:
        k = len(rho)
        while rho[:k] not in memo:
            k -= 1
        cur = memo[rho[:k]]
        for i in range(k, len(rho)):
            pair = _split(oracle, cur, max_len)
            cur = pair[int(rho[i])]
            memo[rho[: i + 1]] = cur
        return cur

    phi_map = StringMap(phi, "phi")
    beta = beta or StringMap(lambda x: x, "beta")
    return Type3Synthesis(phi_map.compose(beta), phi_map, start)


# ---------------------------------------------------------------------------
# expanding node


def find_expanding_node(delta: StringMap, horizon: int, nodes: Iterable[str]) -> tuple[str, int]:
    """(xi, k) with xi a proper prefix of delta^k(xi).

    mu_0 is the first non-root node (then the root) in ``nodes`` whose image
    is longer; the walk mu_{i+1} = delta(mu_i) cut to |mu_0| runs until it
    repeats.
    """
    pool = [x for x in nodes if len(x) <= horizon]
    order = [x for x in pool if x] + [x for x in pool if not x]
    mu0 = None
    for x in order:
        try:
            if len(delta(x)) > len(x):
                mu0 = x
                break
        except EscapesHorizon:
            continue
    if mu0 is None:
        raise NoGrowingNode(f"no node up to length {horizon} is sent to a longer string")
    mus = [mu0]
    while True:
        nxt = delta(mus[-1])[: len(mu0)]
        if nxt in mus:
            i = mus.index(nxt)
            xi, k = mus[i], len(mus) - i
            break
        mus.append(nxt)
    if not strict_prefix(xi, delta.power(k)(xi)):
        raise NoGrowingNode(f"walk ended at {xi!r} but it is not expanded by delta^{k}")
    return xi, k


# ---------------------------------------------------------------------------
# branching walk


@dataclass
class DominatingWitness:
    iota: StringMap
    alpha: str
    beta_chain: list[str]
    c: list[int]
    xi: str = ""
    k: int = 1
    j: int = 1
    orbit: list[str] = field(default_factory=list)  # iota^n(alpha), n = 0..

    def check(self, is_branching: Callable[[str], bool]) -> list[str]:
        """Violations of iota^n(alpha) < beta_n < iota^{n+1}(alpha), branching beta_n, c(n) = |iota^{n+1}(alpha)|."""
        bad = []
        for n, b in enumerate(self.beta_chain):
            lo, hi = self.orbit[n], self.orbit[n + 1]
            if not (strict_prefix(lo, b) and strict_prefix(b, hi)):
                bad.append(f"beta_{n} is not strictly between iota^{n}(alpha) and iota^{n + 1}(alpha)")
            if not is_branching(b):
                bad.append(f"beta_{n} = {b!r} is not a branching node")
            if self.c[n] != len(hi):
                bad.append(f"c({n}) differs from the length of iota^{n + 1}(alpha)")
        return bad


def _checked(f: StringMap, x: str, horizon: int) -> str:
    y = f(x)
    if len(y) > horizon:
        raise EscapesHorizon(f"image of length {len(y)} exceeds the horizon {horizon}", progress=len(y))
    return y


def branching_walk(delta: StringMap, horizon: int, is_branching: Callable[[str], bool],
                   n_max: int, xi: Optional[str] = None, k: Optional[int] = None,
                   nodes: Optional[Iterable[str]] = None) -> DominatingWitness:
    """gamma = delta^k, iota = gamma^2; find beta_0 on the gamma-orbit of xi,
    then beta_{n+1} = inf(iota(beta_n 0), iota(beta_n 1)) for n < n_max."""
    if xi is None or k is None:
        if nodes is None:
            raise ValueError("give either (xi, k) or the node list")
        xi, k = find_expanding_node(delta, horizon, nodes)
    gamma = delta.power(k)
    iota = gamma.power(2)
    orbit = [xi]
    beta0 = None
    j = 0
    while beta0 is None:
        orbit.append(_checked(gamma, orbit[-1], horizon))
        j = len(orbit) - 2
        if j < 1:
            continue
        lo, hi = orbit[j], orbit[j + 1]
        for length in range(len(lo), len(hi)):
            if is_branching(hi[:length]):
                beta0 = hi[:length]
                break
    alpha = orbit[j - 1]
    betas = [beta0]
    chain = [alpha, _checked(iota, alpha, horizon)]
    for n in range(n_max):
        b = betas[-1]
        left, right = _checked(iota, b + "0", horizon), _checked(iota, b + "1", horizon)
        betas.append(lcp(left, right))
        chain.append(_checked(iota, chain[-1], horizon))
    c = [len(chain[n + 1]) for n in range(n_max + 1)]
    if not all(is_branching(b) for b in betas):
        raise NoBranchingFound("an infimum on the beta chain is not a branching node")
    return DominatingWitness(iota, alpha, betas, c, xi, k, j, chain)


# ---------------------------------------------------------------------------
# decoding


@dataclass(frozen=True)
class Verdict:
    n: int
    finite: bool
    after: int  # the stage the question was asked about


def decode_jump(seq: Sequence[int], family, k_set=None, n_max: Optional[int] = None) -> list[Verdict]:
    """A_n is declared finite iff it receives nothing after stage seq[n].

    Correct whenever seq dominates the settling stages of the finite sets;
    ``k_set`` is accepted for symmetry with the oracle questions and unused
    by the mock schedule, which answers them directly.
    """
    n_max = len(seq) - 1 if n_max is None else n_max
    return [Verdict(n, not family.has_event_after(n, seq[n]), seq[n]) for n in range(n_max + 1)]
