import pytest
from hypothesis import given, strategies as st

import brute
from artifact import fixtures as fx
from artifact.codings import singlepath as sp
from artifact.codings import staircase as sc
from artifact.codings.spine import detect_path, glue_spine, induce_component_embedding, strip_path
from artifact.codings.type3 import (
    Type3Limit, branching_levels, pack, relabel_computable, tau_string, type3_build, unpack,
)
from artifact.embedding import Embedding, NotFound, find_embedding, identity, verify_embedding
from artifact.errors import BadSigmaLength, ComponentTooTall, DuplicateString, HorizonTooSmall
from artifact.oracles import ApproxStack, CeFamily, MockCeSet
from artifact.trees import FiniteTree, build_from_parent_list, chain, isomorphic


# -- staircase --------------------------------------------------------------

def test_staircase_without_k_keeps_heights():
    r = sc.staircase_build(MockCeSet(), 10)
    assert all(h == e for e, h in sc.heights_at(r, 10).items())
    assert r.markers.change_stages() == [0]


def test_staircase_single_entry_moves_marker_zero():
    k = MockCeSet([(0, 3)])
    r = sc.staircase_build(k, 10)
    assert [r.markers.value(i, 2) for i in range(3)] == [2, 4, 6]
    assert r.markers.value(0, 3) == 4
    assert all(sc.check_properties(r, 10, k).values())


@pytest.mark.parametrize("mode", [sc.EXTEND_TOP, sc.INSERT_BOTTOM])
def test_staircase_properties_every_stage(mode):
    k = MockCeSet([(1, 7), (0, 12), (3, 30), (2, 41)])
    r = sc.staircase_build(k, 60, mode)
    for s in range(61):
        got = sc.check_properties(r, s)
        assert got["I"] and got["II"], s
    assert sc.check_properties(r, 60, k)["III"]


def test_staircase_markers_increase():
    r = sc.staircase_build(MockCeSet([(1, 7), (0, 12), (3, 30)]), 40)
    for s in range(41):
        ms = r.markers.markers_upto(60, s)
        assert all(a < b for a, b in zip(ms, ms[1:]))
        if s:
            assert all(r.markers.value(i, s - 1) <= r.markers.value(i, s) for i in range(6))


def test_staircase_horizon_check():
    with pytest.raises(HorizonTooSmall):
        sc.staircase_build(MockCeSet([(0, 50)]), 10)


def test_staircase_decode_needs_moved_node():
    r = sc.staircase_build(MockCeSet(), 5)
    with pytest.raises(ValueError):
        sc.staircase_decode(identity(r.tree.freeze()), 0, 3, MockCeSet())


def test_staircase_truncation_has_only_trivial_self_embedding():
    # derived by brute-force search over all self-maps of the truncated tree
    r = sc.staircase_build(MockCeSet(), 3, window=6)
    t = r.tree.freeze()
    assert brute.count_self_embeddings(t) == 1


# -- single path --------------------------------------------------------------

def test_single_path_without_k_is_a_chain():
    r = sp.singlepath_build(MockCeSet(), 30)
    assert r.attach == list(range(30))
    assert r.tree.freeze() == chain(31)


def test_single_path_decode_hand_example():
    k = MockCeSet([(1, 2), (3, 9)])
    r = sp.singlepath_build(k, 200)
    dec = sp.singlepath_decode(r, 6)
    assert dec == [frozenset(x for x in (1, 3) if x < n) for n in range(7)]


def test_single_path_spine_formula_and_branching():
    r = sp.singlepath_build(fx.k_set("singlepath"), 300)
    t = r.tree.freeze()
    xs = sp.path_extract(t)
    for n, x in enumerate(xs):
        assert x == max(m for m in t.nodes if t.height(m) <= n)
    assert all(t.branching(n) <= 2 for n in t.nodes)
    assert sp.path_by_successors(t) == xs
    assert set(xs) == set(r.tree.metadata.isolated_path)


def test_single_path_tech_conditions():
    r = sp.singlepath_build(fx.k_set("singlepath"), 120)
    for s in range(121):
        assert all(sp.tech_conditions(r.tree.freeze(s)).values())


def test_single_path_decode_horizon():
    r = sp.singlepath_build(MockCeSet([(0, 3)]), 5)
    with pytest.raises(HorizonTooSmall):
        sp.singlepath_decode(r, 20)


def test_harden_without_k_adds_nothing():
    h = sp.harden_weak(MockCeSet(), 30)
    assert all(x % 2 == 0 for x in h.tree.freeze().nodes)


def test_harden_side_trees_have_distinct_leaf_heights():
    h = sp.harden_weak(MockCeSet([(1, 2), (0, 6)]), 40)
    t = h.tree.freeze()
    path = sp.hardened_path(t)
    offs = sp.just_off_nodes(t, path)
    assert offs
    for x in offs:
        heights = [t.height(y) for y in t.descendants(x) if not t.successors(y)]
        assert len(heights) == len(set(heights))
        assert brute.count_self_embeddings(t.subtree(x)) == 1


# -- spine ------------------------------------------------------------------

T7 = build_from_parent_list([(0, None), (1, 0), (2, 1), (3, 0), (4, 0), (5, 4), (6, 4)])


def test_glue_then_strip_is_identity():
    g = glue_spine(T7)
    v, _ = strip_path(g.tree, g.spine, rho=0)
    assert v == T7
    assert find_embedding(v, T7) is not NotFound and find_embedding(T7, v) is not NotFound


def test_glue_of_no_components_is_a_bare_chain():
    g = glue_spine(build_from_parent_list([(0, None)]))
    assert g.component_roots == [] and isomorphic(g.tree, chain(len(g.spine)))


def test_detect_path_finds_the_spine_below_tall_chains():
    g = glue_spine(T7)
    assert detect_path(g.tree) <= set(g.spine)
    assert g.spine[0] in detect_path(g.tree)


def test_glue_rejects_tall_components():
    with pytest.raises(ComponentTooTall):
        glue_spine(chain(6))


def test_spine_shift_induces_component_shift():
    heights = [0, 0, 1, 1, 2, 2, 3, 3, 3, 3]
    pm = {0: None}
    nid = 1
    for h in heights:
        prev = 0
        for _ in range(h + 1):
            pm[nid] = prev
            prev = nid
            nid += 1
    t = FiniteTree(pm)
    g = glue_spine(t)
    s = g.tree
    delta = {}
    for i in range(len(g.spine) - 1):
        delta[g.spine[i]] = g.spine[i + 1]
    roots = g.component_roots
    for i in range(len(roots) - 1):
        w = find_embedding(s.subtree(roots[i]), s.subtree(roots[i + 1]))
        delta.update(w.map)
    dom = [x for x in s.nodes if x in delta]
    e = Embedding(s.induced(dom), s, delta)
    assert verify_embedding(e).ok
    d2 = induce_component_embedding(e, g.spine, t.root)
    assert verify_embedding(d2).ok
    assert d2.map[t.root] == t.root
    assert all(d2.map[roots[i]] == roots[i + 1] for i in range(len(roots) - 1))


# -- type 3 -------------------------------------------------------------------

def test_tau_string_examples():
    assert tau_string([1, 2], 1, 1, "10") == "01000"
    assert tau_string([0], 0, 0, "0") == "0"
    with pytest.raises(BadSigmaLength):
        tau_string([0, 0], 1, 1, "0")


@given(st.lists(st.integers(0, 6), min_size=1, max_size=6), st.data())
def test_tau_string_length(avals, data):
    n = len(avals) - 1
    sigma = data.draw(st.text("01", min_size=n + 1, max_size=n + 1))
    assert len(tau_string(avals, n, n, sigma)) == n + 1 + sum(avals)


@given(st.text("01", max_size=30))
def test_pack_round_trip(x):
    assert unpack(pack(x)) == x


def test_branching_levels_formula():
    assert branching_levels([4, 9, 9, 9, 10], 4) == [4, 14, 24, 34, 45]
    assert branching_levels([], 3) == [0, 1, 2, 3]


def test_all_zero_stack_levels():
    st_ = ApproxStack(CeFamily({i: [] for i in range(5)}), MockCeSet())
    r = type3_build(st_, 40)
    assert r.empirical_levels(4, late=20) == [0, 1, 2, 3, 4]


def test_type3_closed_under_prefixes_each_stage():
    r = type3_build(fx.stack("a"), 60)
    seen = set()
    for x in r.enumeration(3000):
        assert x == "" or x[:-1] in seen
        seen.add(x)


def test_type3_limit_view():
    lim = Type3Limit([4, 9, 9, 9, 10])
    assert lim.levels == [4, 14, 24, 34, 45]
    assert lim.is_branching("0000") and not lim.is_branching("000")
    assert not lim.infinite("01")
    assert lim.next_branching("0") == "0000"


def test_relabel_examples():
    r = relabel_computable(["", "0", "01"])
    assert r.tree == chain(3)
    r = relabel_computable(["", "1", "0"])
    assert r.tree.successors(0) == (1, 2)
    assert r.is_successor(0, 2) and not r.is_successor(1, 2)
    with pytest.raises(DuplicateString):
        relabel_computable(["", "0", "0"])
    with pytest.raises(ValueError):
        relabel_computable(["", "01"])
