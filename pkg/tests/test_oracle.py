import itertools

import pytest
from hypothesis import given

from hamseq.errors import CapExceeded
from hamseq.generators import grid, named
from hamseq.graph import Graph
from hamseq.oracle import Mode, adjacency_walk, backtrack_solve, dp_solve, exact_solve, validate

from conftest import brute_force_hamiltonian, complete_graph, cycle_graph, path_graph
from strategies import connected_graphs, graphs


def test_validate_examples():
    assert validate(cycle_graph(4), [0, 1, 2, 3], Mode.PATH)
    assert not validate(path_graph(4), [1, 2, 3], Mode.PATH)
    assert not validate(named("bowtie"), [0, 1, 2, 3, 4], Mode.CIRCUIT)
    assert validate(named("bowtie"), [0, 1, 2, 3, 4], Mode.PATH)


def test_validate_rejects_repeats_gaps_and_empty():
    c4 = cycle_graph(4)
    assert not validate(c4, [0, 1, 1, 2, 3])
    assert not validate(c4, [0, 2, 1, 3])
    assert not validate(c4, [])
    assert not validate(c4, [0, 1, 2, 3, 4])


def test_circuit_needs_three_vertices_unless_single():
    assert validate(Graph(1), [0], Mode.CIRCUIT)
    k2 = Graph(2, [(0, 1)])
    assert validate(k2, [0, 1], Mode.PATH)
    assert not validate(k2, [0, 1], Mode.CIRCUIT)


@given(connected_graphs(max_n=6))
def test_validator_agrees_with_adjacency_walk_on_all_orders(g):
    for perm in itertools.permutations(range(g.n)):
        for mode in Mode:
            assert validate(g, perm, mode) == adjacency_walk(g, perm, mode)


@given(graphs(max_n=7))
def test_exact_solvers_agree_with_brute_force(g):
    for mode in Mode:
        dp = dp_solve(g, mode)
        bt = backtrack_solve(g, mode)
        assert dp == bt
        assert (dp is not None) == brute_force_hamiltonian(g, mode is Mode.CIRCUIT)
        if dp is not None:
            assert adjacency_walk(g, dp, mode)


@pytest.mark.parametrize("g, mode, exists", [
    (named("petersen"), Mode.CIRCUIT, False),
    (named("petersen"), Mode.PATH, True),
    (complete_graph(4), Mode.CIRCUIT, True),
    (named("star4"), Mode.PATH, False),
    (named("bowtie"), Mode.PATH, True),
    (named("bowtie"), Mode.CIRCUIT, False),
    (grid(3, 3), Mode.PATH, True),
    (grid(3, 3), Mode.CIRCUIT, False),
    (grid(4, 4), Mode.CIRCUIT, True),
])
def test_named_instances(g, mode, exists):
    assert (exact_solve(g, mode) is not None) == exists


def test_cap():
    with pytest.raises(CapExceeded):
        exact_solve(cycle_graph(25), Mode.CIRCUIT)
    assert exact_solve(cycle_graph(25), Mode.CIRCUIT, cap=30) is not None
