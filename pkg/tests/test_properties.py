"""Invariants checked on generated inputs."""

import brute
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from artifact.adversary.cac import cac_build, cac_verify
from artifact.adversary.isomaxinf import isomaxinf_run
from artifact.adversary.isomaxinf_audit import isomaxinf_verify
from artifact.adversary.programs import BranchEnum, EmptyEnum, LeavesEnum, NewestEnum, parse_config
from artifact.analysis.chains import Antichain, Chain, chain_or_antichain
from artifact.embedding import NotFound, find_embedding, verify_embedding
from artifact.errors import Undetermined
from artifact.trees import FiniteTree, StagewiseTree

SLOW = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def trees(draw, max_nodes=7):
    n = draw(st.integers(1, max_nodes))
    return FiniteTree({i: (None if i == 0 else draw(st.integers(0, i - 1))) for i in range(n)})


@st.composite
def stagewise(draw, max_stages=12):
    p = StagewiseTree()
    p.add(0, None)
    nxt = 1
    for _ in range(draw(st.integers(0, max_stages))):
        p.new_stage()
        for _ in range(draw(st.integers(0, 3))):
            p.add(nxt, draw(st.integers(0, nxt - 1)))
            nxt += 1
    return p


@given(trees())
def test_height_is_monotone(t):
    for x in t.nodes:
        for y in t.descendants(x):
            assert t.height(x) <= t.height(y)


@given(stagewise())
def test_snapshots_only_grow(p):
    prev = {}
    for s in range(p.horizon + 1):
        cur = p.freeze(s).parent_map()
        assert all(cur.get(x, "gone") == q for x, q in prev.items())
        prev = cur


@given(trees())
def test_embedding_is_reflexive(t):
    e = find_embedding(t, t)
    assert e is not NotFound and verify_embedding(e).ok


@given(trees(5), trees(5), trees(5))
def test_embedding_is_transitive(a, b, c):
    ab, bc = find_embedding(a, b), find_embedding(b, c)
    if ab is not NotFound and bc is not NotFound:
        assert find_embedding(a, c) is not NotFound


@given(trees(6), trees(7))
def test_find_agrees_with_brute_force(a, b):
    e = find_embedding(a, b)
    assert (e is not NotFound) == brute.embeddings_exist(a, b)
    if e is not NotFound:
        assert verify_embedding(e).ok
        assert brute.is_valid_embedding(a, b, e.map)


ENUM_MAKERS = [
    lambda s: EmptyEnum(),
    lambda s: BranchEnum("left", s),
    lambda s: BranchEnum("right", s),
    lambda s: LeavesEnum(s),
    lambda s: NewestEnum(),
]


@SLOW
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 20)), min_size=1, max_size=4),
       st.integers(100, 200))
def test_cac_audits_hold(specs, horizon):
    # every requirement acts at most twice, so these horizons leave room to settle
    enums = [ENUM_MAKERS[k](s) for k, s in specs]
    r = cac_build(enums, horizon)
    assert all(c.ok for c in cac_verify(r.records()))


@given(stagewise(), st.integers(2, 6))
def test_chain_or_antichain_certificates_verify(p, size):
    try:
        out = chain_or_antichain(p, size)
    except Undetermined:
        return
    t = p.freeze()
    assert isinstance(out, (Chain, Antichain))
    assert len(out.nodes) == size and out.verify(t)
    if isinstance(out, Antichain):
        assert all(x in t.leaves() for x in out.nodes)


PAIR_LINES = [
    "tree=mirror delay={d} map=shift shift={k}",
    "tree=mirror delay={d} map=identity",
    "tree=pump start={k} map=shift shift=1",
    "tree=tall map=identity",
    "tree=empty map=empty",
    "tree=mirror delay={d} map=empty",
]


@SLOW
@given(st.lists(st.tuples(st.integers(0, len(PAIR_LINES) - 1), st.integers(1, 3), st.integers(1, 3)),
                min_size=1, max_size=3),
       st.integers(10, 40))
def test_isomaxinf_structural_audits_hold(specs, horizon):
    lines = [f"pair <{i},0> " + PAIR_LINES[j].format(d=d, k=k) for i, (j, d, k) in enumerate(specs)]
    r = isomaxinf_run(parse_config("\n".join(lines)).pairs, horizon)
    checks = {c.name: c for c in isomaxinf_verify(r.records())}
    for name in ("component-audit", "aprop1", "setup-protection", "step3-impossibility", "priority-reset"):
        assert checks[name].ok, checks[name].detail
