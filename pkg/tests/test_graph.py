import networkx as nx
import pytest
from hypothesis import given

from hamseq.generators import named
from hamseq.graph import Graph, articulations, bfs_layers, blocks, components, count_components, is_connected

from conftest import cycle_graph, path_graph, to_nx
from strategies import graphs


def test_rejects_self_loops_duplicates_and_range():
    with pytest.raises(ValueError):
        Graph(2, [(1, 1)])
    with pytest.raises(ValueError):
        Graph(2, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph(2, [(0, 2)])


@given(graphs())
def test_adjacency_symmetric_and_edge_count(g):
    for v in range(g.n):
        for w in g.adj[v]:
            assert v in g.adj[w]
            assert v != w
    assert 2 * g.m == sum(g.degree(v) for v in range(g.n))


def test_articulation_examples():
    assert articulations(named("bowtie"), range(5)) == {2}
    assert articulations(cycle_graph(6), range(6)) == set()
    assert articulations(path_graph(4), range(4)) == {1, 2}


@given(graphs())
def test_articulations_match_removal_count(g):
    live = set(range(g.n))
    base = count_components(g, live)
    brute = {v for v in live if count_components(g, live - {v}) > base}
    assert articulations(g, live) == brute


@given(graphs(max_n=9))
def test_articulations_match_networkx(g):
    assert articulations(g, range(g.n)) == set(nx.articulation_points(to_nx(g)))


@given(graphs(max_n=9))
def test_blocks_match_networkx(g):
    ours = sorted(sorted(b) for b in blocks(g) if len(b) > 1)
    theirs = sorted(sorted(b) for b in nx.biconnected_components(to_nx(g)))
    assert ours == theirs


def test_component_examples():
    assert components(cycle_graph(6), range(6)) == [frozenset(range(6))]
    two = Graph(4, [(0, 1), (2, 3)])
    assert sorted(map(sorted, components(two, range(4)))) == [[0, 1], [2, 3]]
    p = Graph(5, [(1, 2), (2, 3), (3, 4)])
    assert sorted(map(sorted, components(p, {1, 4}))) == [[1], [4]]
    assert is_connected(cycle_graph(6), range(6))
    assert not is_connected(two, range(4))


@given(graphs())
def test_components_match_networkx(g):
    ours = sorted(sorted(c) for c in components(g, range(g.n)))
    assert ours == sorted(sorted(c) for c in nx.connected_components(to_nx(g)))


def test_bfs_layer_examples():
    assert bfs_layers(cycle_graph(6), range(6), 0) == [{0}, {1, 5}, {2, 4}, {3}]
    assert bfs_layers(Graph(1), [0], 0) == [{0}]
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    assert bfs_layers(star, range(4), 1) == [{1}, {0}, {2, 3}]
    with pytest.raises(ValueError):
        bfs_layers(star, {0, 2}, 1)
