import pytest

from artifact.errors import DuplicateNode, MissingMetadata, MultipleRoots, OrphanParent, ParseError, UnknownNode
from artifact.trees import (
    ComponentKind, FiniteTree, GroundTruth, StagewiseTree, all_rooted_trees, build_from_parent_list,
    chain, classify_component, classify_tree_type, shape, star, tree_from_treev1, tree_to_treev1,
)


def test_single_node_tree():
    t = build_from_parent_list([(0, None)])
    assert t.root == 0 and t.nodes == {0} and t.ht() == 0


def test_parent_list_readback():
    t = build_from_parent_list([(0, None), (2, 0), (4, 0), (6, 2)])
    assert t.successors(0) == (2, 4)
    assert t.parent(6) == 2
    assert t.is_leq(0, 6) and t.is_leq(2, 6) and not t.is_leq(4, 6)


@pytest.mark.parametrize("events, err", [
    ([(0, None), (1, 5)], OrphanParent),
    ([(0, None), (0, None)], DuplicateNode),
    ([(0, None), (1, 0), (1, 0)], DuplicateNode),
    ([(0, None), (1, None)], MultipleRoots),
    ([(1, 0)], OrphanParent),
    ([], ParseError),
])
def test_parent_list_errors(events, err):
    with pytest.raises(err):
        build_from_parent_list(events)


def test_chain_queries():
    t = chain(3)
    assert t.height(2) == 2 and t.ht() == 2 and t.leaves() == {2}
    assert t.branching(0) == 1
    assert t.ancestors(2) == [0, 1, 2]


def test_star_queries():
    t = star(4)
    assert t.branching(0) == 4
    comps = t.components()
    assert len(comps) == 4 and all(len(c) == 1 for c in comps)
    assert t.leaves() == {1, 2, 3, 4}


def test_subtree_keeps_order():
    t = build_from_parent_list([(0, None), (1, 0), (2, 1), (3, 1), (4, 0)])
    s = t.subtree(1)
    assert s.root == 1 and s.nodes == {1, 2, 3}
    assert s.successors(1) == (2, 3)


def test_unknown_node():
    with pytest.raises(UnknownNode):
        chain(2).height(7)


def test_induced_skips_missing_ancestors():
    t = chain(4)
    s = t.induced([0, 2, 3])
    assert s.parent(2) == 0 and s.parent(3) == 2


@pytest.mark.parametrize("kind", [ComponentKind.A, ComponentKind.B, ComponentKind.C, ComponentKind.D])
def test_canonical_shapes_classify(kind):
    assert classify_component(shape(kind, start=10)) is kind


def test_b_shape_by_hand():
    t = build_from_parent_list([(0, None), (1, 0), (2, 0), (3, 2)])
    assert classify_component(t) is ComponentKind.B


def test_three_leaves_with_one_grandchild_is_other():
    t = build_from_parent_list([(0, None), (1, 0), (2, 0), (3, 0), (4, 1)])
    assert classify_component(t) is ComponentKind.OTHER


def test_classification_counts_on_small_trees():
    # derived by enumerating all trees with up to 6 nodes: each named kind has exactly one shape
    counts = {k: 0 for k in ComponentKind}
    for n in range(1, 7):
        for t in all_rooted_trees(n):
            counts[classify_component(t)] += 1
    named = {k: v for k, v in counts.items() if k is not ComponentKind.OTHER}
    assert named == {ComponentKind.A: 1, ComponentKind.B: 1, ComponentKind.C: 1, ComponentKind.D: 1}
    assert sum(counts.values()) == 1 + 1 + 2 + 4 + 9 + 20


def test_stagewise_freeze_and_monotone():
    p = StagewiseTree()
    p.add(0, None)
    p.new_stage()
    p.add(1, 0)
    p.new_stage()
    p.add(2, 0, below=1)
    assert p.freeze(0).nodes == {0}
    assert p.freeze(1).parent(1) == 0
    assert p.freeze(2).parent(1) == 2
    assert p.freeze(2).is_leq(0, 1)
    assert p.stage_of(2) == 2


def test_stagewise_rejects_orphans_and_bad_insert():
    p = StagewiseTree()
    p.add(0, None)
    with pytest.raises(OrphanParent):
        p.add(3, 9)
    p.add(1, 0)
    p.add(2, 1)
    with pytest.raises(OrphanParent):
        p.add(5, 0, below=2)


def test_treev1_round_trip():
    p = StagewiseTree()
    p.add(0, None)
    p.new_stage()
    p.add(1, 0)
    p.add(2, 0)
    p.new_stage()
    p.add(3, 0, below=1)
    text = p.to_treev1()
    q = StagewiseTree.from_treev1(text)
    assert q.horizon == 2
    assert all(q.freeze(s) == p.freeze(s) for s in range(3))
    assert tree_from_treev1(tree_to_treev1(chain(4))) == chain(4)


def test_treev1_parse_error():
    with pytest.raises(ParseError):
        StagewiseTree.from_treev1("0 .\nx y\n")


def test_tree_type_from_metadata():
    p = StagewiseTree(GroundTruth(tree_type=1, maximal_infinite=0, infinite_nodes=frozenset({0})))
    assert classify_tree_type(p) == 1
    p = StagewiseTree(GroundTruth(tree_type=2, isolated_path=(0, 1)))
    assert classify_tree_type(p) == 2
    assert classify_tree_type(StagewiseTree(GroundTruth(tree_type=3))) == 3
    with pytest.raises(MissingMetadata):
        classify_tree_type(StagewiseTree())
    with pytest.raises(ValueError):
        GroundTruth(tree_type=1)


def test_rooted_tree_counts():
    assert [len(all_rooted_trees(n)) for n in range(1, 8)] == [1, 1, 2, 4, 9, 20, 48]


def test_finite_tree_rejects_missing_parent():
    with pytest.raises(OrphanParent):
        FiniteTree({0: None, 1: 7})
