import pytest
from hypothesis import given

import support
from divtrees import (
    Graph,
    InternalInvariantError,
    MistInstance,
    NtstInstance,
    enumerate_spanning_trees,
    mist_kernel,
    ntst_kernel,
)
from divtrees.blackbox import (
    _checked_mist,
    _checked_ntst,
    mist_no_instance,
    mist_yes_instance,
    ntst_no_instance,
    ntst_yes_instance,
)


def test_instance_validation():
    g = support.path_graph(3)
    with pytest.raises(ValueError, match="non-negative"):
        MistInstance(graph=g, q=-1)
    with pytest.raises(ValueError, match="outside vertex range"):
        NtstInstance(graph=g, nonterminals=frozenset({4}))


def test_canonical_instances_decide_themselves():
    yes = mist_yes_instance()
    no = mist_no_instance()
    assert yes.graph.n == 2 and yes.q == 0
    assert no.graph.n == 2 and no.q == 2
    nt_yes = ntst_yes_instance()
    nt_no = ntst_no_instance()
    assert nt_yes.graph.n == 2 and nt_yes.nonterminals == frozenset()
    assert nt_no.nonterminals == frozenset({1, 2})


def test_mist_kernel_small_cases():
    p3 = support.path_graph(3)
    assert mist_kernel(MistInstance(p3, 1)) == mist_yes_instance()
    assert mist_kernel(MistInstance(p3, 2)) == mist_no_instance()
    assert mist_kernel(MistInstance(p3, 0)) == mist_yes_instance()
    disconnected = Graph(n=3, edges=frozenset({(1, 2)}))
    assert mist_kernel(MistInstance(disconnected, 1)) == mist_no_instance()
    # q = 0 short-circuits even when disconnected enumeration would fail
    assert mist_kernel(MistInstance(disconnected, 0)) == mist_no_instance()


def test_ntst_kernel_small_cases():
    p3 = support.path_graph(3)
    assert ntst_kernel(NtstInstance(p3, frozenset({2}))) == ntst_yes_instance()
    assert ntst_kernel(NtstInstance(p3, frozenset({1}))) == ntst_no_instance()
    assert ntst_kernel(NtstInstance(p3, frozenset())) == ntst_yes_instance()
    # every spanning tree of C4 is a path leaving one of the marked pair a leaf
    c4 = support.cycle_graph(4)
    assert ntst_kernel(NtstInstance(c4, frozenset({1, 3}))) == ntst_no_instance()
    assert ntst_kernel(NtstInstance(c4, frozenset({1}))) == ntst_yes_instance()
    disconnected = Graph(n=3, edges=frozenset({(1, 2)}))
    assert ntst_kernel(NtstInstance(disconnected, frozenset())) == ntst_no_instance()


def test_budget_exhaustion_returns_none():
    c4 = support.cycle_graph(4)
    # negative instances need the full enumeration, so a tight budget
    # must give up rather than guess
    assert mist_kernel(MistInstance(c4, 3), budget=2) is None
    assert ntst_kernel(NtstInstance(c4, frozenset({1, 3})), budget=2) is None
    # an early witness still counts even under the same budget
    assert mist_kernel(MistInstance(c4, 1), budget=2) == mist_yes_instance()


def test_output_size_bounds_are_enforced():
    p3 = support.path_graph(3)
    with pytest.raises(InternalInvariantError, match="exceeds its size bound"):
        _checked_mist(MistInstance(p3, 0))
    with pytest.raises(InternalInvariantError, match="exceeds its size bound"):
        _checked_ntst(NtstInstance(support.cycle_graph(4), frozenset()))
    # two non-terminals allow up to 6 vertices
    roomy = NtstInstance(support.cycle_graph(5), frozenset({1, 2}))
    assert _checked_ntst(roomy) is roomy


@given(g=support.connected_graphs(min_n=2, max_n=7, max_extra=4))
def test_mist_kernel_matches_enumeration(g):
    best = max(t.internal_count for t in enumerate_spanning_trees(g))
    for q in range(0, g.n + 1):
        out = mist_kernel(MistInstance(g, q))
        assert out is not None
        assert (out == mist_yes_instance()) == (best >= q)


@given(g=support.connected_graphs(min_n=2, max_n=7, max_extra=4))
def test_ntst_kernel_matches_enumeration(g):
    trees = list(enumerate_spanning_trees(g))
    for nt in [frozenset(), frozenset({1}), frozenset({1, g.n})]:
        expected = any(nt <= t.internal_vertices for t in trees)
        out = ntst_kernel(NtstInstance(g, nt))
        assert out is not None
        assert (out == ntst_yes_instance()) == expected
