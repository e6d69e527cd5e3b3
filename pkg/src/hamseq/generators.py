"""Seeded graph families for test corpora and benchmarks."""

from __future__ import annotations

import random
from itertools import combinations

from .errors import InvalidParams
from .graph import Graph, is_connected

NAMED = ("petersen", "bowtie", "k4", "star4", "spider7")


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise InvalidParams(f"p must lie in [0, 1], got {p}")


def _planted(n: int, p: float, seed: int, closed: bool) -> Graph:
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    edges = {tuple(sorted(e)) for e in zip(order, order[1:])}
    if closed:
        edges.add(tuple(sorted((order[-1], order[0]))))
    for u, v in combinations(range(n), 2):
        if (u, v) not in edges and rng.random() < p:
            edges.add((u, v))
    return Graph(n, sorted(edges))


def planted_cycle(n: int, p: float, seed: int) -> Graph:
    if n < 3:
        raise InvalidParams("planted_cycle needs n >= 3")
    _check_p(p)
    return _planted(n, p, seed, closed=True)


def planted_path(n: int, p: float, seed: int) -> Graph:
    if n < 1:
        raise InvalidParams("planted_path needs n >= 1")
    _check_p(p)
    return _planted(n, p, seed, closed=False)


def gnp_connected(n: int, p: float, seed: int, max_tries: int = 1000) -> Graph:
    if n < 1:
        raise InvalidParams("gnp_connected needs n >= 1")
    _check_p(p)
    rng = random.Random(seed)
    for _ in range(max_tries):
        edges = [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p]
        g = Graph(n, edges)
        if is_connected(g, range(n)):
            return g
    raise InvalidParams(f"no connected G({n}, {p}) after {max_tries} samples")


def grid(rows: int, cols: int) -> Graph:
    if rows < 1 or cols < 1:
        raise InvalidParams("grid dimensions must be positive")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def named(name: str) -> Graph:
    if name == "petersen":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return Graph(10, outer + spokes + inner)
    if name == "bowtie":
        return Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    if name == "k4":
        return Graph(4, list(combinations(range(4), 2)))
    if name == "star4":
        return Graph(4, [(0, 1), (0, 2), (0, 3)])
    if name == "spider7":
        return Graph(7, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6)])
    raise InvalidParams(f"unknown named graph {name!r}; choose from {', '.join(NAMED)}")


FAMILIES = ("planted_cycle", "planted_path", "gnp_connected", "grid", "named")


def generate(family: str, params: dict, seed: int = 0) -> Graph:
    try:
        if family == "planted_cycle":
            return planted_cycle(int(params["n"]), float(params.get("p", 0.0)), seed)
        if family == "planted_path":
            return planted_path(int(params["n"]), float(params.get("p", 0.0)), seed)
        if family == "gnp_connected":
            return gnp_connected(int(params["n"]), float(params["p"]), seed)
        if family == "grid":
            return grid(int(params["rows"]), int(params["cols"]))
        if family == "named":
            return named(str(params["name"]))
    except KeyError as exc:
        raise InvalidParams(f"{family} is missing parameter {exc.args[0]!r}") from None
    raise InvalidParams(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
