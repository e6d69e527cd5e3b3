"""Undirected simple graphs over dense integer vertices, plus the
connectivity queries everything else is built on.

Vertex subsets ("masks") are plain Python sets/frozensets of ints. Deleting a
vertex from a working scene means dropping it from the mask; the Graph itself
never changes.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable


class Graph:
    __slots__ = ("n", "adj", "m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if v in nbrs[u]:
                raise ValueError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
            m += 1
        self.n = n
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in nbrs)
        self.m = m

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def vertices(self) -> frozenset[int]:
        return frozenset(range(self.n))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def with_edge(self, u: int, v: int) -> Graph:
        """Copy of this graph with one extra edge."""
        return Graph(self.n, self.edges() + [(min(u, v), max(u, v))])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def components(g: Graph, live: Iterable[int]) -> list[frozenset[int]]:
    """Connected components of g[live], ordered by smallest member."""
    live = set(live)
    seen: set[int] = set()
    out = []
    for s in sorted(live):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in g.adj[x]:
                if y in live and y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        out.append(frozenset(comp))
    return out


def count_components(g: Graph, live: Iterable[int]) -> int:
    return len(components(g, live))


def is_connected(g: Graph, live: Iterable[int]) -> bool:
    return len(components(g, live)) <= 1


def articulations(g: Graph, live: Iterable[int]) -> set[int]:
    """Cut vertices of g[live] via iterative lowpoint DFS."""
    live = set(live)
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    cuts: set[int] = set()
    counter = 0
    for root in sorted(live):
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        root_children = 0
        stack = [(root, -1, iter(sorted(g.adj[root] & live)))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w in disc:
                    if disc[w] < low[v]:
                        low[v] = disc[w]
                    continue
                disc[w] = low[w] = counter
                counter += 1
                if v == root:
                    root_children += 1
                stack.append((w, v, iter(sorted(g.adj[w] & live))))
                advanced = True
                break
            if advanced:
                continue
            stack.pop()
            if parent >= 0:
                if low[v] < low[parent]:
                    low[parent] = low[v]
                if parent != root and low[v] >= disc[parent]:
                    cuts.add(parent)
        if root_children >= 2:
            cuts.add(root)
    return cuts


def blocks(g: Graph) -> list[frozenset[int]]:
    """Biconnected components (vertex sets) of g, bridges included as pairs.

    Isolated vertices come back as singleton blocks.
    """
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    out: list[frozenset[int]] = []
    counter = 0
    for root in range(g.n):
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        if not g.adj[root]:
            out.append(frozenset([root]))
            continue
        edges: list[tuple[int, int]] = []
        stack = [(root, -1, iter(sorted(g.adj[root])))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w in disc:
                    if disc[w] < disc[v]:
                        edges.append((v, w))
                        low[v] = min(low[v], disc[w])
                    continue
                disc[w] = low[w] = counter
                counter += 1
                edges.append((v, w))
                stack.append((w, v, iter(sorted(g.adj[w]))))
                advanced = True
                break
            if advanced:
                continue
            stack.pop()
            if parent < 0:
                continue
            low[parent] = min(low[parent], low[v])
            if low[v] >= disc[parent]:
                part: set[int] = set()
                while True:
                    a, b = edges.pop()
                    part.update((a, b))
                    if (a, b) == (parent, v):
                        break
                out.append(frozenset(part))
    return out


def bfs_layers(g: Graph, live: Iterable[int], root: int) -> list[set[int]]:
    """Distance layers from root inside g[live]; layer 0 is {root}."""
    live = set(live)
    if root not in live:
        raise ValueError(f"root {root} is not live")
    dist = {root: 0}
    layers: list[set[int]] = [{root}]
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in g.adj[x]:
            if y in live and y not in dist:
                dist[y] = dist[x] + 1
                if dist[y] == len(layers):
                    layers.append(set())
                layers[dist[y]].add(y)
                queue.append(y)
    return layers
