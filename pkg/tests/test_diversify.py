import pytest
from hypothesis import given, strategies as st

import support
from divtrees import (
    Graph,
    InternalInvariantError,
    LeafSwapPlan,
    SmallnessReport,
    SpanningTree,
    arbitrary_spanning_tree,
    build_diverse_family,
    generate,
    grow_leaves,
    hamming,
    plan_swaps,
    verify_family,
)
from divtrees.diversify import _conflict_edges, _find_cycle, _rotate_cycle


def k4_star():
    g = support.complete_graph(4)
    t = SpanningTree(g, frozenset({(1, 2), (1, 3), (1, 4)}))
    return g, t


# ---------------------------------------------------------------------------
# the worked K4 example, pinned end to end

def test_plan_on_k4_star():
    g, t = k4_star()
    plan = plan_swaps(g, t, {2, 3, 4}, k=2, ell=2)
    assert plan.tree_neighbor == {2: 1, 3: 1, 4: 1}
    # lowest-id non-tree neighbor; everything here is inside L
    assert plan.swap_target == {2: 3, 3: 2, 4: 2}
    assert plan.conflict_edges == frozenset({(2, 3), (2, 4)})
    # 2 is the conflict-star center, so the larger color class is {3, 4}
    assert plan.independent == frozenset({3, 4})
    assert plan.blocks == (frozenset({3}), frozenset({4}))


def test_family_on_k4_star():
    g, t = k4_star()
    plan = plan_swaps(g, t, {2, 3, 4}, k=2, ell=2)
    fam = build_diverse_family(g, t, plan)
    assert [ti.edges for ti in fam] == [
        frozenset({(1, 2), (1, 4), (2, 3)}),
        frozenset({(1, 2), (1, 3), (2, 4)}),
    ]
    assert hamming(fam[0], fam[1]) == 4
    assert verify_family(g, fam, p=2, q=1, k=2).verdict


def test_plan_prefers_targets_outside_chosen_leaves():
    # 6-vertex host: star at 1 over {2,3,4}, plus 5 and 6 hanging off 4
    # and extra edges so every leaf can swap somewhere.
    g = Graph.from_edges(
        6, [(1, 2), (1, 3), (1, 4), (4, 5), (4, 6), (2, 5), (3, 5), (2, 3)]
    )
    t = SpanningTree(g, frozenset({(1, 2), (1, 3), (1, 4), (4, 5), (4, 6)}))
    plan = plan_swaps(g, t, {2, 3}, k=4, ell=1)
    # 2 would pick 3 by id, but 5 is outside L; same for 3
    assert plan.swap_target == {2: 5, 3: 5}
    assert plan.conflict_edges == frozenset()
    assert plan.independent == frozenset({2, 3})


def test_plan_shortfall_message():
    g, t = k4_star()
    with pytest.raises(ValueError, match="only 2 conflict-free leaves, need 3"):
        plan_swaps(g, t, {2, 3, 4}, k=4, ell=3)


def test_plan_input_validation():
    g, t = k4_star()
    other = support.cycle_graph(4)
    with pytest.raises(ValueError, match="does not span"):
        plan_swaps(other, t, {2}, k=2, ell=1)
    with pytest.raises(ValueError, match="at least 3 vertices"):
        g2 = support.path_graph(2)
        plan_swaps(g2, arbitrary_spanning_tree(g2), {2}, k=2, ell=1)
    with pytest.raises(ValueError, match="at least 1"):
        plan_swaps(g, t, {2}, k=0, ell=1)
    with pytest.raises(ValueError, match="at least 1"):
        plan_swaps(g, t, {2}, k=2, ell=0)
    with pytest.raises(ValueError, match="not a leaf"):
        plan_swaps(g, t, {1}, k=2, ell=1)


def test_plan_rejects_degree_one_leaf():
    g = support.path_graph(3)
    t = arbitrary_spanning_tree(g)
    with pytest.raises(ValueError, match="host degree < 2"):
        plan_swaps(g, t, {3}, k=2, ell=1)


def test_plan_on_cycle_path_tree():
    g = support.cycle_graph(6)
    t = arbitrary_spanning_tree(g)  # drops (4, 5)
    assert t.leaves == frozenset({4, 5})
    plan = plan_swaps(g, t, {4, 5}, k=2, ell=1)
    # 4 and 5 target each other; one survives the coloring
    assert plan.conflict_edges == frozenset({(4, 5)})
    assert plan.independent == frozenset({4})
    fam = build_diverse_family(g, t, plan)
    assert fam[0].edges == (t.edges - {(3, 4)}) | {(4, 5)}


# ---------------------------------------------------------------------------
# conflict bookkeeping helpers

def test_conflict_edges_only_inside_leaf_set():
    leaves = frozenset({2, 3, 4})
    assert _conflict_edges(leaves, {2: 3, 3: 1, 4: 7}) == frozenset({(2, 3)})
    assert _conflict_edges(leaves, {2: 1, 3: 1, 4: 1}) == frozenset()


def test_find_cycle_on_forest_and_triangle():
    assert _find_cycle([1, 2, 3, 4], frozenset({(1, 2), (3, 4)})) is None
    cyc = _find_cycle([1, 2, 3, 4], frozenset({(1, 2), (2, 3), (1, 3)}))
    assert cyc is not None
    assert sorted(cyc) == [1, 2, 3]


def test_find_cycle_skips_acyclic_component():
    edges = frozenset({(1, 2), (3, 4), (4, 5), (3, 5)})
    cyc = _find_cycle([1, 2, 3, 4, 5], edges)
    assert sorted(cyc) == [3, 4, 5]


def test_rotate_cycle_forward_orientation():
    # targets chain backwards along [1, 2, 3]
    target = {1: 3, 2: 1, 3: 2}
    _rotate_cycle([1, 2, 3], target)
    assert target == {1: 3, 2: 3, 3: 2}
    assert _conflict_edges(frozenset({1, 2, 3}), target) == frozenset(
        {(1, 3), (2, 3)}
    )


def test_rotate_cycle_reversed_orientation():
    target = {1: 2, 2: 3, 3: 1}
    _rotate_cycle([1, 2, 3], target)
    # reversed candidate is [3, 2, 1]: vertex 2 re-aims at 1
    assert target == {1: 2, 2: 1, 3: 1}


def test_rotate_cycle_rejects_inconsistent_targets():
    target = {1: 2, 2: 1, 3: 1}
    with pytest.raises(InternalInvariantError, match="consistent orientation"):
        _rotate_cycle([1, 2, 3], target)


# ---------------------------------------------------------------------------
# plan validation (constructor-level)

def valid_plan_parts():
    g, t = k4_star()
    return dict(
        tree=t,
        leaves=frozenset({2, 3, 4}),
        tree_neighbor={2: 1, 3: 1, 4: 1},
        swap_target={2: 3, 3: 2, 4: 2},
        conflict_edges=frozenset({(2, 3), (2, 4)}),
        independent=frozenset({3, 4}),
        blocks=(frozenset({3}), frozenset({4})),
    )


def test_plan_constructor_accepts_consistent_parts():
    plan = LeafSwapPlan(**valid_plan_parts())
    assert plan.independent == frozenset({3, 4})


@pytest.mark.parametrize(
    "patch, exc, message",
    [
        ({"leaves": frozenset({1, 2})}, ValueError, "not a leaf"),
        ({"tree_neighbor": {2: 3, 3: 1, 4: 1}}, ValueError, "wrong tree neighbor"),
        ({"swap_target": {2: 1, 3: 2, 4: 2}}, ValueError, "bad swap target"),
        ({"conflict_edges": frozenset()}, ValueError, "do not match"),
        ({"independent": frozenset({1})}, ValueError, "consist of chosen leaves"),
        (
            {"independent": frozenset({2, 3})},
            ValueError,
            "touches a conflict edge",
        ),
        ({"blocks": (frozenset({2}),)}, ValueError, "come from the independent"),
        (
            {"blocks": (frozenset({3}), frozenset({3}))},
            ValueError,
            "must be disjoint",
        ),
        (
            {"blocks": (frozenset({3, 4}), frozenset())},
            ValueError,
            "same size",
        ),
    ],
)
def test_plan_constructor_rejections(patch, exc, message):
    parts = valid_plan_parts()
    parts.update(patch)
    with pytest.raises(exc, match=message):
        LeafSwapPlan(**parts)


def test_plan_constructor_rejects_conflict_cycle():
    parts = valid_plan_parts()
    parts["swap_target"] = {2: 3, 3: 4, 4: 2}
    parts["conflict_edges"] = frozenset({(2, 3), (3, 4), (2, 4)})
    parts["independent"] = frozenset()
    parts["blocks"] = ()
    with pytest.raises(InternalInvariantError, match="contain a cycle"):
        LeafSwapPlan(**parts)


# ---------------------------------------------------------------------------
# family construction guards

def test_build_rejects_foreign_tree():
    g, t = k4_star()
    plan = plan_swaps(g, t, {2, 3, 4}, k=2, ell=2)
    t2 = SpanningTree(g, frozenset({(1, 2), (2, 3), (3, 4)}))
    with pytest.raises(ValueError, match="different tree"):
        build_diverse_family(g, t2, plan)


def test_build_rejects_nonterminal_leaf():
    g, t = k4_star()
    plan = plan_swaps(g, t, {2, 3, 4}, k=2, ell=2)
    with pytest.raises(ValueError, match="is a leaf of the base tree"):
        build_diverse_family(g, t, plan, nt=frozenset({2}))


def test_build_rejects_nonterminal_without_outside_neighbors():
    g, t = k4_star()
    plan = plan_swaps(g, t, {2, 3, 4}, k=2, ell=2)
    with pytest.raises(ValueError, match="two tree neighbors outside"):
        build_diverse_family(g, t, plan, nt=frozenset({1}))


def test_build_keeps_nonterminals_internal():
    # path tree on C6 plus chords: internal spine stays internal
    g = Graph.from_edges(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6), (2, 6)])
    t = SpanningTree(g, frozenset({(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)}))
    plan = plan_swaps(g, t, {1}, k=2, ell=1)
    fam = build_diverse_family(g, t, plan, nt=frozenset({3, 4}))
    assert frozenset({3, 4}) <= fam[0].internal_vertices


# ---------------------------------------------------------------------------
# verification

def test_verify_family_accepts_raw_edge_sets():
    g, _ = k4_star()
    fam = [
        frozenset({(1, 2), (1, 4), (2, 3)}),
        frozenset({(1, 2), (1, 3), (2, 4)}),
    ]
    report = verify_family(g, fam, p=2, q=1, k=4)
    assert report.verdict
    assert [p.distance for p in report.pairs] == [4]


def test_verify_family_flags_each_failure():
    g, t = k4_star()
    plan = plan_swaps(g, t, {2, 3, 4}, k=2, ell=2)
    fam = build_diverse_family(g, t, plan)
    # every member has exactly 2 leaves
    assert not verify_family(g, fam, p=3, q=1, k=2).verdict
    assert not verify_family(g, fam, p=0, q=3, k=2).verdict
    report = verify_family(g, fam, p=0, q=0, k=6)
    assert not report.verdict
    assert report.pairs[0].distance == 4 and not report.pairs[0].ok
    # 3 is a leaf of the first member
    assert not verify_family(g, fam, p=0, q=0, k=2, nt=frozenset({3})).verdict


def test_verify_family_rejects_non_spanning_sets():
    g, _ = k4_star()
    triangle = frozenset({(1, 2), (2, 3), (1, 3)})
    report = verify_family(g, [triangle], p=0, q=0, k=1)
    assert not report.trees[0].spanning
    assert not report.verdict
    foreign = frozenset({(1, 2), (2, 3), (5, 6)})
    assert not verify_family(g, [foreign], p=0, q=0, k=1).verdict


def test_verify_family_json_shape():
    g, _ = k4_star()
    report = verify_family(g, [frozenset({(1, 2), (1, 3), (1, 4)})], p=1, q=1, k=1)
    d = report.to_json_dict()
    assert d["verdict"] is True
    assert d["trees"][0]["leaf_count"] == 3
    assert d["pairs"] == []


# ---------------------------------------------------------------------------
# the full construct pipeline on dense hosts

@given(
    n=st.integers(min_value=12, max_value=40),
    k=st.sampled_from([2, 4, 6, 8]),
    ell=st.sampled_from([1, 2]),
)
def test_grow_plan_build_round_trip(n, k, ell):
    g = generate("min-degree-3", (n,))
    block = -(-k // 4)
    need = block * ell
    grown = grow_leaves(g, arbitrary_spanning_tree(g), frozenset(), 2 * need, s=ell + 3)
    if isinstance(grown, SmallnessReport):
        return
    plan = plan_swaps(g, grown, grown.leaves, k, ell)
    fam = build_diverse_family(g, grown, plan)
    assert len(fam) == ell
    for i in range(ell):
        for j in range(i + 1, ell):
            assert hamming(fam[i], fam[j]) == 4 * block
    assert verify_family(g, fam, p=grown.leaf_count - block, q=0, k=k).verdict
