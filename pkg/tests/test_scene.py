import pytest
from hypothesis import given

from hamseq.errors import Disconnected
from hamseq.generators import named
from hamseq.graph import Graph
from hamseq.scene import (
    BREAKPOINTS,
    Label,
    Scene,
    check_constraints_1_2,
    context_change,
    creatable_components,
    maximum_induction,
    virtual_articulation,
)

from conftest import complete_graph, cycle_graph, path_graph
from strategies import connected_graphs


def labelled(g, root):
    s = Scene.full(g, root)
    context_change(s, root, root)
    return s


def names(s):
    return {v: {lab.name for lab in labs} for v, labs in s.labels.items()}


def test_tiers_of_cycle_and_triangle():
    tiers = maximum_induction(Scene.full(cycle_graph(6), 0))
    assert [set(t.vertices) for t in tiers] == [{2, 3, 4}, {3}]
    assert tiers[0].edges == ((2, 3), (3, 4))
    assert maximum_induction(Scene.full(complete_graph(3), 0)) == []


def test_tiers_of_disconnected_graph():
    with pytest.raises(Disconnected):
        maximum_induction(Scene.full(Graph(4, [(0, 1), (2, 3)]), 0))


def test_spider_labels():
    s = labelled(named("spider7"), 4)
    assert names(s) == {
        0: {"MIN_ART"}, 1: {"DEGEN"}, 2: {"DEGEN"}, 3: {"DEGEN"},
        4: {"NEUTRAL"}, 5: {"MIN_LEAF"}, 6: {"MIN_LEAF"},
    }
    assert virtual_articulation(s, 0)


def test_path_labels():
    s = labelled(path_graph(5), 0)
    assert names(s) == {0: {"NEUTRAL"}, 1: {"NEUTRAL"}, 2: {"NEUTRAL"}, 3: {"DEGEN"}, 4: {"MIN_LEAF"}}
    assert not virtual_articulation(s, 4)


def test_triangle_all_neutral():
    assert all(v == {"NEUTRAL"} for v in names(labelled(complete_graph(3), 0)).values())


@given(connected_graphs(min_n=2, max_n=9))
def test_label_invariants(g):
    s = labelled(g, 0)
    assert set(s.labels) == set(range(g.n))
    for v, labs in s.labels.items():
        assert labs
        assert not {Label.MIN_ART, Label.MIN_LEAF} <= labs
        if Label.DEGEN in labs:
            assert labs == {Label.DEGEN}
        if labs & BREAKPOINTS and g.degree(v) == 1:
            assert not virtual_articulation(s, v)
    for tier in s.tiers:
        assert tier.vertices <= s.live


def test_creatable_components_examples():
    s = Scene.full(path_graph(5), 0)
    s.live.discard(0)
    got = sorted((sorted(c.vertices), c.hn, sorted(c.boundary), c.creatable) for c in creatable_components(s))
    assert got == [([1], 1, [2], True), ([4], 1, [3], True)]

    whole = creatable_components(Scene.full(cycle_graph(6), 0))
    assert [(c.hn, c.creatable) for c in whole] == [(0, False)]

    bow = creatable_components(Scene.full(named("bowtie"), 0))
    assert sorted((sorted(c.vertices), c.hn, c.creatable) for c in bow) == [([0, 1], 1, True), ([3, 4], 1, True)]


def test_constraints_examples():
    assert not check_constraints_1_2(Scene.full(path_graph(5), 0), 0)
    c6 = Scene.full(cycle_graph(6), 0)
    assert all(check_constraints_1_2(c6, v) for v in range(6))
    assert not check_constraints_1_2(Scene.full(named("bowtie"), 0), 1)


def test_context_change_keeps_edges():
    g = cycle_graph(6)
    s = Scene.full(g, 0)
    context_change(s, 0, 0)
    assert [set(t.vertices) for t in s.tiers] == [{2, 3, 4}, {3}]
    before = g.edges()
    context_change(s, 3, 0)  # 3 is not adjacent to 0; the extra edge is temporary
    assert g.edges() == before
    assert s.graph is g
    assert s.root == 3 and s.current == 0
