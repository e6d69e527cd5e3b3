import itertools

import networkx as nx
import pytest
from hypothesis import settings

from hamseq.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# filled by the acceptance checks, printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def brute_force_hamiltonian(g: Graph, circuit: bool) -> bool:
    if g.n == 1:
        return True
    for perm in itertools.permutations(range(g.n)):
        if circuit and perm[0] != 0:
            break
        if all(g.has_edge(a, b) for a, b in zip(perm, perm[1:])):
            if not circuit or (g.n >= 3 and g.has_edge(perm[-1], perm[0])):
                return True
    return False


@pytest.fixture
def c6():
    return cycle_graph(6)


@pytest.fixture
def k3():
    return complete_graph(3)
