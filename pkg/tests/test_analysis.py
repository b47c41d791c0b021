import pytest

from artifact import fixtures as fx
from artifact.analysis.chains import Antichain, Chain, chain_or_antichain, stable_leaves
from artifact.analysis.synthesis import synthesize_type1, synthesize_type2
from artifact.analysis.type3_embed import (
    StringMap, as_embedding, branching_walk, decode_jump, find_expanding_node, synthesize_type3,
)
from artifact.binary import lcp
from artifact.codings.singlepath import singlepath_build
from artifact.codings.staircase import staircase_build, staircase_decode
from artifact.codings.type3 import Type3Limit
from artifact.embedding import nontrivial, verify_embedding, weakly_nontrivial
from artifact.errors import NoGrowingNode, OracleFailure, Undetermined
from artifact.oracles import CeFamily, MockCeSet, limit_oracle
from artifact.trees import StagewiseTree, chain, star


def test_type1_on_empty_k_staircase():
    p = staircase_build(MockCeSet(), 8).tree
    syn = synthesize_type1(p, limit_oracle(p))
    e = syn.embedding
    assert verify_embedding(e).ok and weakly_nontrivial(e) and nontrivial(e, p)
    t = p.freeze()
    for src, dst in syn.targets.items():
        assert t.subtree_height(dst) >= t.subtree_height(src) and dst > src


def test_type1_structural_oracle_needs_node():
    p = staircase_build(MockCeSet(), 8).tree
    o = limit_oracle(p)
    with pytest.raises(OracleFailure):
        synthesize_type1(p, o.structural())
    syn = synthesize_type1(p, o.structural(), n=0)
    assert verify_embedding(syn.embedding).ok


def test_type1_decode_recovers_k():
    k = MockCeSet([(1, 7), (0, 12), (3, 30)])
    r = staircase_build(k, 60)
    syn = synthesize_type1(r.tree, limit_oracle(r.tree))
    e = syn.embedding
    n = next(x for x in sorted(e.map) if e.map[x] != x)
    d = staircase_decode(e, n, 4, k, floor=r.floor)
    assert d.bits(4) == [x in k.members() for x in range(4)]
    assert all(a < b for a, b in zip(d.psi, d.psi[1:]))


def test_type2_on_pure_chain_is_a_shift():
    p = singlepath_build(MockCeSet(), 20).tree
    syn = synthesize_type2(p, limit_oracle(p))
    e = syn.embedding
    assert verify_embedding(e).ok
    assert all(e.map[x] == x + 1 for x in e.map if x >= syn.fixed_prefix)


def test_type2_on_hardened_tree():
    from artifact.codings.singlepath import harden_weak

    p = harden_weak(fx.k_set("singlepath"), 200).tree
    syn = synthesize_type2(p, limit_oracle(p))
    assert verify_embedding(syn.embedding).ok and nontrivial(syn.embedding, p)


def test_type3_on_full_binary_tree():
    class Full:
        def infinite(self, x):
            return True

        def successors(self, x):
            return [x + "0", x + "1"]

    syn = synthesize_type3(Full())
    assert syn.start == "0"
    e, ids = as_embedding(syn.alpha, [x for x in Type3Limit([0]).nodes(4)])
    assert verify_embedding(e).ok
    assert ids[""] not in e.image()


def test_type3_on_shipped_stack():
    lim = Type3Limit.from_stack(fx.stack("a"))
    syn = synthesize_type3(lim)
    e, ids = as_embedding(syn.alpha, list(lim.nodes(20)))
    assert verify_embedding(e).ok
    assert ids[""] not in e.image()


def test_expanding_node_on_chain_shift():
    delta = StringMap(lambda x: x + "0")
    xi, k = find_expanding_node(delta, 10, ["", "0", "00"])
    assert (xi, k) == ("0", 1)


def test_expanding_node_after_a_walk():
    def d(x):
        if not x:
            return x
        return "1" + x[1:] if x[0] == "0" else "00" + x[1:]

    xi, k = find_expanding_node(StringMap(d), 10, ["", "0", "1", "00"])
    assert (xi, k) == ("1", 2)
    assert StringMap(d).power(k)(xi).startswith(xi) and len(StringMap(d).power(k)(xi)) > len(xi)


def test_expanding_node_fails_on_permutation():
    flip = StringMap(lambda x: "".join("1" if b == "0" else "0" for b in x))
    with pytest.raises(NoGrowingNode):
        find_expanding_node(flip, 3, ["", "0", "1"])


def test_infimum_is_longest_common_prefix():
    assert lcp("0010", "0001") == "00"


def test_branching_walk_dominates_levels():
    st = fx.stack("a")
    lim = Type3Limit.from_stack(st)
    syn = synthesize_type3(lim)
    xi, k = find_expanding_node(syn.alpha, 5000, lim.nodes(8))
    w = branching_walk(syn.alpha, 200_000, lim.is_branching, 3, xi, k)
    assert w.check(lim.is_branching) == []
    assert all(w.c[n] >= lim.b(n) for n in range(4))


def test_decode_jump_examples():
    empty = CeFamily({i: [] for i in range(4)})
    assert all(v.finite for v in decode_jump([0, 0, 0, 0], empty))
    fam = fx.family("a")
    lim = Type3Limit.from_stack(fx.stack("a"))
    verdicts = decode_jump([lim.b(n) for n in range(2)], fam)
    assert [v.finite for v in verdicts] == [True, False]
    zero = decode_jump([0], fam)
    assert zero[0].finite is False  # A_0 gets an element after stage 0, so the verdict is wrong


def test_antichain_from_star():
    p = fx.leafy(40)
    r = chain_or_antichain(p, 40)
    assert isinstance(r, Antichain) and len(r.nodes) == 40 and r.verify(p.freeze())
    assert set(r.nodes) <= set(stable_leaves(p, p.horizon, 1))


def test_chain_from_growing_chain():
    p = fx.leafless(40)
    r = chain_or_antichain(p, 30)
    assert isinstance(r, Chain) and r.verify(p.freeze())


def test_undetermined_when_too_small():
    with pytest.raises(Undetermined):
        chain_or_antichain(StagewiseTree.from_tree(star(3)), 10)
    with pytest.raises(Undetermined):
        chain_or_antichain(StagewiseTree.from_tree(star(12)), 20)


def test_certificates_reject_bad_members():
    t = chain(4)
    assert not Antichain((1, 2)).verify(t)
    assert not Chain((2, 1)).verify(t)
    assert Chain((0, 2, 3)).verify(t)
