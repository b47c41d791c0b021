import random

import pytest

import brute
from artifact.embedding import (
    Embedding, Inconsistent, NotFound, embed_into_binary, embedding_map_from_text, embeds,
    find_embedding, identity, iterate, kruskal_index, nontrivial, orbit, verify_embedding,
    weakly_nontrivial,
)
from artifact.errors import EscapesHorizon, OracleFailure, ParseError, PartialMap
from artifact.fixtures import chain_sequence, star_prefixed
from artifact.trees import ComponentKind, FiniteTree, all_rooted_trees, build_from_parent_list, chain, shape, star


def test_short_chain_into_long_chain():
    w = find_embedding(chain(3), chain(5))
    assert w is not NotFound and verify_embedding(w).ok
    assert w.map == {0: 0, 1: 1, 2: 2}


def test_long_chain_into_short_chain():
    assert find_embedding(chain(5), chain(3)) is NotFound


def test_c_into_b_and_a_into_b():
    b = shape(ComponentKind.B)
    assert find_embedding(shape(ComponentKind.C), b) is NotFound
    assert find_embedding(shape(ComponentKind.A), b) is not NotFound
    assert brute.embeddings_exist(shape(ComponentKind.A), b)
    assert not brute.embeddings_exist(shape(ComponentKind.C), b)


def test_witness_is_least_in_preorder():
    a = star(2)
    b = build_from_parent_list([(0, None), (1, 0), (2, 0), (3, 0)])
    assert find_embedding(a, b).map == {0: 0, 1: 1, 2: 2}


def test_fixed_pins_root():
    a, b = chain(2), chain(4)
    w = find_embedding(a, b, fixed={0: 2})
    assert w.map == {0: 2, 1: 3}
    assert find_embedding(a, b, fixed={0: 3}) is NotFound
    assert find_embedding(a, b, fixed={9: 0}) is NotFound


def test_all_pairs_up_to_five_nodes_match_brute_force():
    trees = [t for n in range(1, 6) for t in all_rooted_trees(n)]
    for a in trees:
        for b in trees:
            assert embeds(a, b) == brute.embeddings_exist(a, b)


def test_identity_verifies_and_is_trivial():
    e = identity(star(3))
    assert verify_embedding(e).ok
    assert not weakly_nontrivial(e)


def test_order_inversion_rejected():
    t = chain(3)
    rep = verify_embedding(Embedding(t, t, {0: 0, 1: 2, 2: 1}))
    assert not rep.ok and rep.violations


def test_sibling_collapse_rejected():
    t = star(2)
    c = chain(3)
    assert not verify_embedding(Embedding(t, c, {0: 0, 1: 1, 2: 2})).ok


def test_partial_map_raises():
    t = chain(3)
    with pytest.raises(PartialMap):
        verify_embedding(Embedding(t, t, {0: 0}))


def test_nontrivial_margin():
    t = chain(4)
    e = Embedding(t.induced([0, 1, 2]), t, {0: 1, 1: 2, 2: 3})
    assert weakly_nontrivial(e)
    assert nontrivial(e, t)


def test_iterate_identity():
    e = identity(chain(4))
    assert iterate(e, 5).map == e.map
    assert iterate(e, 0).map == e.map


def test_iterate_shift_on_chain():
    t = chain(10)
    e = Embedding(t.induced(range(9)), t, {n: n + 1 for n in range(9)})
    e3 = iterate(e, 3, partial=True)
    assert e3.map == {n: n + 3 for n in range(7)}
    with pytest.raises(EscapesHorizon):
        iterate(e, 3)
    assert orbit(e, 0, 3) == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        iterate(e, -1)


def test_binary_code_of_root_and_children():
    t = build_from_parent_list([(0, None), (3, 0), (1, 0), (2, 1)])
    assert embed_into_binary(t, 0) == "0"
    assert embed_into_binary(t, 3) == "01110"
    assert embed_into_binary(t, 2) == "010110"


def test_binary_code_preserves_order():
    rng = random.Random(3)
    t = FiniteTree({i: (None if i == 0 else rng.randrange(i)) for i in range(25)})
    codes = {n: embed_into_binary(t, n) for n in t.nodes}
    for n in t.nodes:
        for m in t.nodes:
            assert t.is_leq(n, m) == codes[m].startswith(codes[n])
        assert len(codes[n]) == len(t.ancestors(n)) + sum(t.ancestors(n))


def test_binary_code_rejects_lying_oracle():
    class Liar:
        def is_successor(self, m, n):
            return True

    with pytest.raises(OracleFailure):
        embed_into_binary(chain(3), 2, Liar())
    with pytest.raises(OracleFailure):
        embed_into_binary(chain(3), 9)


def test_kruskal_examples():
    assert kruskal_index(chain_sequence(), 50) == 0
    assert kruskal_index(star_prefixed(), 50) == 1
    assert kruskal_index([star(3)] * 20, 20) == 0
    with pytest.raises(ValueError):
        kruskal_index([chain(1)], 5)


def test_kruskal_inconsistent_when_last_index_fails():
    seq = [chain(10 - i) for i in range(10)]
    assert kruskal_index(seq, 10) is Inconsistent


def test_embedding_text_round_trip():
    w = find_embedding(chain(2), chain(3))
    assert embedding_map_from_text(w.to_text()) == w.map
    with pytest.raises(ParseError):
        embedding_map_from_text("1 => 2")
