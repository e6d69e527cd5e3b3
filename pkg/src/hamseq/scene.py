"""Rooted working scenes: tier decomposition, vertex labelling and the
articulation-component bookkeeping that drives the mapping phase."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from collections.abc import Iterable

from .errors import Disconnected
from .graph import Graph, articulations, components


class Label(enum.Enum):
    MIN_ART = "A"
    MIN_LEAF = "L"
    ART_N = "AN"
    DEGEN = "D"
    INTER = "I"
    NEUTRAL = "N"


LabelSet = frozenset  # frozenset[Label]

BREAKPOINTS = frozenset({Label.MIN_ART, Label.MIN_LEAF})


def is_breakpoint(labels: frozenset) -> bool:
    return bool(labels & BREAKPOINTS)


@dataclass(frozen=True)
class Tier:
    index: int
    vertices: frozenset[int]
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ComponentInfo:
    vertices: frozenset[int]
    hn: int
    boundary: frozenset[int]
    creatable: bool


@dataclass
class Scene:
    graph: Graph
    live: set[int]
    root: int
    labels: dict[int, frozenset] = field(default_factory=dict)
    tiers: list[Tier] = field(default_factory=list)
    last: dict[int, int | None] = field(default_factory=dict)
    split: dict[int, bool] = field(default_factory=dict)
    current: int | None = None
    contexts: int = 0

    @classmethod
    def full(cls, g: Graph, root: int) -> Scene:
        return cls(graph=g, live=set(range(g.n)), root=root, current=root)

    def clone(self) -> Scene:
        return Scene(
            graph=self.graph,
            live=set(self.live),
            root=self.root,
            labels=dict(self.labels),
            tiers=list(self.tiers),
            last=dict(self.last),
            split=dict(self.split),
            current=self.current,
            contexts=self.contexts,
        )

    def live_neighbors(self, v: int) -> set[int]:
        return self.graph.adj[v] & self.live

    def degree(self, v: int) -> int:
        return len(self.graph.adj[v] & self.live)


# -- tiers -----------------------------------------------------------------

def induce_tiers(g: Graph, live: Iterable[int], root: int) -> list[Tier]:
    """Peel BFS frontiers off `root`; each remainder becomes a tier."""
    live = frozenset(live)
    if root not in live:
        raise ValueError(f"root {root} is not live")
    absorbed = {root}
    frontier = {root}
    tiers: list[Tier] = []
    while len(absorbed) != len(live):
        nxt = set()
        for a in frontier:
            nxt |= g.adj[a] & live
        nxt -= absorbed
        if not nxt:
            raise Disconnected(f"{len(live) - len(absorbed)} vertices unreachable from {root}")
        absorbed |= nxt
        rest = live - absorbed
        if rest:
            tiers.append(_tier(g, len(tiers), rest))
        frontier = nxt
    return tiers


def _tier(g: Graph, index: int, verts: frozenset[int]) -> Tier:
    edges = tuple((u, w) for u in sorted(verts) for w in sorted(g.adj[u] & verts) if u < w)
    return Tier(index, frozenset(verts), edges)


def maximum_induction(s: Scene) -> list[Tier]:
    return induce_tiers(s.graph, s.live, s.root)


# -- labelling -------------------------------------------------------------

def label_vertices(g: Graph, live: Iterable[int], tiers: list[Tier]) -> dict[int, frozenset]:
    live = frozenset(live)
    work: dict[int, set[Label]] = {w: set() for w in live}
    for tier in tiers:
        verts = tier.vertices
        cuts = articulations(g, verts)
        for w in verts:
            if w not in work:
                continue
            tier_deg = len(g.adj[w] & verts)
            if tier_deg == 0:
                continue
            if len(g.adj[w] & live) != 2:
                if w in cuts:
                    work[w].add(Label.MIN_ART)
                if tier_deg == 1:
                    work[w].add(Label.MIN_LEAF)
            elif w in cuts:
                work[w].add(Label.ART_N)
    for w, ls in work.items():
        if Label.MIN_ART in ls:
            ls.discard(Label.MIN_LEAF)
    breakpoints = [w for w in sorted(live) if work[w] & BREAKPOINTS]
    bp_set = set(breakpoints)
    for b in breakpoints:
        for w in g.adj[b] & live:
            if w not in bp_set:
                work[w] = {Label.DEGEN}
    unlabeled = [w for w in sorted(live) if not work[w]]
    for w in unlabeled:
        degen = sum(1 for x in g.adj[w] & live if work[x] == {Label.DEGEN})
        work[w] = {Label.INTER} if degen >= 2 else set()
    for w in unlabeled:
        if not work[w]:
            work[w] = {Label.NEUTRAL}
    return {w: frozenset(ls) for w, ls in work.items()}


def lv_label(s: Scene) -> dict[int, frozenset]:
    return label_vertices(s.graph, s.live, s.tiers)


def degen_neighbors(g: Graph, live: Iterable[int], labels: dict[int, frozenset], w: int) -> int:
    live = set(live)
    return sum(1 for x in g.adj[w] & live if Label.DEGEN in labels.get(x, ()))


def virtual_articulation(s: Scene, w: int) -> bool:
    return degen_neighbors(s.graph, s.live, s.labels, w) >= 2


# -- articulation components -----------------------------------------------

def component_infos(g: Graph, live: Iterable[int], cuts: set[int] | None = None) -> list[ComponentInfo]:
    """Components of g[live - cuts] with their boundary articulations."""
    live = frozenset(live)
    if cuts is None:
        cuts = articulations(g, live)
    existing = set(components(g, live))
    out = []
    for comp in components(g, live - cuts):
        boundary = set()
        for z in comp:
            boundary |= g.adj[z] & cuts
        out.append(ComponentInfo(comp, len(boundary), frozenset(boundary), comp not in existing))
    return out


def creatable_components(s: Scene, extra_removed: Iterable[int] = ()) -> list[ComponentInfo]:
    return component_infos(s.graph, s.live - set(extra_removed))


def constraint_violations(g: Graph, live: Iterable[int], v: int, v0: int | None) -> tuple[list[ComponentInfo], list[ComponentInfo]]:
    """Components of g[live - v] breaking the pendant-block (first list) and
    isolated-root (second list) constraints."""
    reduced = frozenset(live) - {v}
    if not reduced:
        return [], []
    cuts = articulations(g, reduced)
    if not cuts:
        return [], []
    near = {v} | g.adj[v]
    if v0 is not None:
        near |= {v0} | g.adj[v0]
    first, second = [], []
    for info in component_infos(g, reduced, cuts):
        if info.creatable and info.hn == 1 and not (info.vertices & near):
            first.append(info)
        if not info.creatable and v0 is not None and v0 in info.vertices and info.hn == 0:
            second.append(info)
    return first, second


def check_constraints_1_2(s: Scene, v: int) -> bool:
    first, second = constraint_violations(s.graph, s.live, v, s.root)
    return not first and not second


# -- context change --------------------------------------------------------

def context_change(s: Scene, w: int, v: int) -> Scene:
    """Re-root at w with v as the current vertex and relabel."""
    if s.contexts == 0:
        for y in s.live:
            s.last[y] = None
            s.split[y] = True
    s.contexts += 1
    s.root = w
    s.current = v
    g = s.graph
    if w != v and w not in g.adj[v]:
        g = g.with_edge(v, w)
    s.tiers = induce_tiers(g, s.live, w)
    s.labels = label_vertices(g, s.live, s.tiers)
    return s
