import pytest
from hypothesis import assume, given, settings, strategies as st

import brute
from artifact import fixtures as fx
from artifact.errors import HorizonTooSmall, MissingMetadata, OracleFailure, ParseError
from artifact.oracles import ApproxStack, CeFamily, MockCeSet, ce_prefix, limit_oracle
from artifact.trees import StagewiseTree, chain


def test_ce_prefix_readback():
    k = MockCeSet([(2, 1), (5, 3)])
    assert ce_prefix(k, 2, 10) == {2}
    assert ce_prefix(k, 0, 10) == set()
    assert ce_prefix(k, 3, 5) == {2}
    assert ce_prefix(k, 3, 6) == {2, 5}


def test_mock_set_rejects_duplicates_and_round_trips():
    with pytest.raises(ParseError):
        MockCeSet([(1, 2), (1, 5)])
    k = MockCeSet([(3, 4), (1, 2)])
    assert MockCeSet.from_text(k.to_text()).events == k.events
    with pytest.raises(ParseError):
        MockCeSet.from_text("stage x elem 1")


def test_family_one_event_per_stage():
    fam = fx.family("a")
    for s in range(1, 200):
        assert fam.who(s) is not None
    assert fam.who(0) is None
    with pytest.raises(ParseError):
        CeFamily({0: [3], 1: [3]})
    with pytest.raises(ParseError):
        CeFamily({0: [3]}, {0: (1, 2)})


def test_family_text_round_trip():
    fam = fx.family("c")
    again = CeFamily.from_text(fam.to_text())
    assert [again.who(s) for s in range(300)] == [fam.who(s) for s in range(300)]


def test_f_true_examples():
    assert ApproxStack(CeFamily({0: [4]}, {1: (1, 5)}), n_max=1).f_true(1) == 4
    assert ApproxStack(CeFamily({}, {0: (1, 2), 1: (2, 2)}), n_max=1).f_true(1) == 0
    assert ApproxStack(CeFamily({0: [3], 1: [7], 2: [5]}), n_max=2).f_true(2) == 7


def test_f_stage_hand_example():
    st = ApproxStack(CeFamily({0: [1], 1: [2, 3]}), n_max=1)
    assert st.f_stage(1, 3) == 1
    assert st.f_stage(0, 0) == 0


def test_g_row_starts_with_f():
    st = fx.stack("a")
    assert all(st.g_stage(0, s) == st.f_stage(0, s) for s in range(300))


def test_stack_truth_on_shipped_mock():
    # derived: read from the declared schedule (last finite events 4, 7, 10) and K (last change 9)
    t = fx.stack("a").truth()
    assert t.f == [4, 4, 7, 7, 10]
    assert t.h == [2, 9, 9, 9, 9]
    assert t.a == [4, 9, 9, 9, 10]


def test_empty_stack_is_zero():
    st = ApproxStack(CeFamily({i: [] for i in range(5)}), MockCeSet())
    assert st.truth().a == [0] * 5
    assert all(st.a_stage(n, s) == 0 for n in range(5) for s in range(30))


def test_a_is_max_of_g_and_h():
    st = fx.stack("b")
    for s in range(400):
        for n in range(5):
            assert st.a_stage(n, s) == max(st.g_stage(n, s), st.h_stage(n, s))


def test_a_true_bounds():
    st = fx.stack("a")
    assert st.a_true(2) >= 9 and st.a_true(2) >= st.f_true(2)


def test_require_horizon():
    st = fx.stack("a")
    with pytest.raises(HorizonTooSmall):
        st.tail_min("a", 0, 5)


@pytest.mark.parametrize("name", ["a", "b", "c"])
def test_liminf_and_threshold_at_moderate_horizon(name):
    st = fx.stack(name)
    H = 2000
    truth = st.truth()
    for n in range(5):
        assert st.tail_min("f", n, H) == truth.f[n]
        assert st.tail_min("a", n, H) == truth.a[n]
        assert st.threshold("f", n, truth.f[n] + 1, H, truth.f[n]) is not None


def test_memo_matches_fresh_computation():
    a, b = fx.stack("c"), fx.stack("c")
    vals = [a.a_stage(n, s) for s in range(0, 500, 7) for n in range(5)]
    assert vals == [b.a_stage(n, s) for s in range(0, 500, 7) for n in range(5)]


families = st.builds(
    lambda fin, per: (fin, per),
    st.dictionaries(st.integers(0, 2), st.lists(st.integers(1, 40), max_size=3, unique=True), max_size=3),
    st.dictionaries(st.integers(3, 4), st.tuples(st.integers(1, 5), st.integers(2, 6)), max_size=2),
)


@settings(max_examples=40, deadline=None)
@given(families)
def test_f_stage_matches_direct_evaluation(spec):
    fin, per = spec
    try:
        fam = CeFamily(fin, per)
        who = brute.schedule_of(fam, 80)
    except (OracleFailure, ParseError):
        assume(False)
    st_ = ApproxStack(fam, n_max=min(4, max(fam.size - 1, 0)))
    for n in range(st_.n_max + 1):
        for s in range(81):
            assert st_.f_stage(n, s) == brute.f_direct(who, n, s)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 30)), max_size=8, unique_by=lambda e: e[0]),
       st.integers(0, 30), st.integers(0, 25))
def test_ce_prefix_monotone(events, s, n):
    k = MockCeSet(events)
    assert ce_prefix(k, s, n) <= ce_prefix(k, s + 1, n)


def test_limit_oracle_needs_metadata():
    with pytest.raises(MissingMetadata):
        limit_oracle(StagewiseTree.from_tree(chain(3)))


def test_limit_oracle_on_staircase_and_single_path():
    from artifact.codings.singlepath import singlepath_build
    from artifact.codings.staircase import staircase_build

    p = staircase_build(MockCeSet([(0, 3)]), 10).tree
    o = limit_oracle(p)
    assert o.is_subtree_infinite(0)
    assert not any(o.is_subtree_infinite(e) for e in o.successors(0))
    assert o.is_omega_node(0)
    q = singlepath_build(fx.k_set("singlepath"), 60).tree
    oq = limit_oracle(q)
    path = set(q.metadata.isolated_path)
    assert all(oq.is_subtree_infinite(x) == (x in path) for x in q.freeze().nodes)
    s = oq.structural()
    assert s.branching(0) == oq.branching(0)
    assert not hasattr(s, "is_subtree_infinite")
