"""Phase one: walk the rooted scene and emit unsynchronized path fragments.

The walk keeps the root live (it is only consumed by the closing step), so
a run that reaches the base case describes a closed tour through the scene.
Whenever removing the current vertex would leave real cut vertices behind,
the walk detours into the pendant piece next to the root first and then
re-roots the remainder at the piece's cut vertex.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import Disconnected
from .graph import Graph, articulations, components
from .records import EdgeRecord, incidence
from .scene import (
    Label,
    Scene,
    check_constraints_1_2,
    component_infos,
    context_change,
    induce_tiers,
    is_breakpoint,
    label_vertices,
)


class MapError(Exception):
    """Recoverable mapping failure; the enclosing candidate loop moves on."""


class DiscardScene(MapError):
    """The local error budget of a scene ran out."""


class AbortMapping(Exception):
    """The global error budget ran out; the whole attempt stops."""


PRIORITY = {
    Label.MIN_LEAF: 4,
    Label.DEGEN: 3,
    Label.ART_N: 2,
    Label.NEUTRAL: 1,
    Label.INTER: 0,
}


@dataclass
class MappingState:
    eta: int
    m: int
    rng: random.Random
    eps: int = 0
    kappa: int = 0
    max_eps: int = 0
    visited: set[int] = field(default_factory=set)
    le: list[EdgeRecord] = field(default_factory=list)
    best_le: list[EdgeRecord] = field(default_factory=list)
    trace: list[tuple[int, int, str]] = field(default_factory=list)
    seq: int = 0
    selects: int = 0
    label_cache: dict = field(default_factory=dict)

    @classmethod
    def for_graph(cls, g: Graph, seed: int = 0, eta: int | None = None, m: int | None = None) -> MappingState:
        n = g.n
        return cls(
            eta=n if eta is None else eta,
            m=(n * n - n) // 2 if m is None else m,
            rng=random.Random(seed),
        )


def sync_error(st: MappingState, throw: bool) -> None:
    st.eps += 1
    st.kappa += 1
    st.max_eps = max(st.max_eps, st.eps)
    if st.kappa > st.m:
        raise AbortMapping(f"error budget {st.m} exhausted")
    if st.eps > st.eta:
        raise DiscardScene(f"local budget {st.eta} exhausted")
    if throw:
        raise MapError("no admissible successor")


# -- labels of reduced scenes ----------------------------------------------

def labels_of(g: Graph, live, root: int | None, cache: dict | None = None):
    """(labels, tiers) of g[live] rooted at root, or None if disconnected."""
    live = frozenset(live)
    if not live:
        return {}, []
    if root is None or root not in live:
        root = min(live)
    key = (live, root)
    if cache is not None and key in cache:
        return cache[key]
    try:
        tiers = induce_tiers(g, live, root)
        out = (label_vertices(g, live, tiers), tiers)
    except Disconnected:
        out = None
    if cache is not None:
        cache[key] = out
    return out


def _has(labels, w, label) -> bool:
    return label in labels.get(w, ())


def forced_chain(g: Graph, live, start: int, root: int | None) -> list[int]:
    """start followed by the run of degree-2 vertices hanging off it."""
    live = set(live)
    rest = live - {start}
    chain = [start]
    nxt = None
    for w in sorted(g.adj[start] & rest):
        if len(g.adj[w] & rest) == 2 and w != root:
            nxt = w
            break
    prev = start
    while nxt is not None:
        chain.append(nxt)
        onward = sorted((g.adj[nxt] & rest) - {prev} - set(chain))
        prev, nxt = nxt, None
        if len(onward) == 1:
            w = onward[0]
            if len(g.adj[w] & rest) == 2 and w != root:
                nxt = w
    return chain


def _degenerates_art(g: Graph, live, labels, removed, root, cache) -> bool:
    """Some MIN_ART vertex stops being a breakpoint once `removed` is gone."""
    arts = [w for w in live if _has(labels, w, Label.MIN_ART) and w not in removed]
    if not arts:
        return False
    sub = set(live) - set(removed)
    got = labels_of(g, sub, root, cache)
    if got is None:
        return False
    relabeled = got[0]
    return any(not is_breakpoint(relabeled.get(w, frozenset())) for w in arts)


def leaf_admissible(g: Graph, live, labels, root, z: int, cache=None) -> bool:
    chain = forced_chain(g, live, z, root)
    return _degenerates_art(g, live, labels, chain, root, cache)


def successor_allowed(s: Scene, v: int, u: int, cache: dict | None = None) -> int | None:
    """Number of the first constraint admitting v -> u, or None.

    Everything is evaluated in the scene with v removed; 11 is the fallback
    class for vertices outside any breakpoint neighbourhood.
    """
    g = s.graph
    reduced = set(s.live) - {v}
    if u not in reduced:
        return None
    root = s.root if s.root != v else None
    if root is None:
        try:
            tiers = induce_tiers(g, s.live, v)
        except Disconnected:
            return None
        labels = label_vertices(g, reduced, tiers)
    else:
        got = labels_of(g, reduced, root, cache)
        if got is None:
            return None
        labels, tiers = got
    return _admit(g, reduced, labels, tiers, root, u, cache)


def _admit(g, reduced, labels, tiers, root, u, cache) -> int | None:
    lab = labels.get(u, frozenset())
    if Label.MIN_ART in lab:
        return None
    if Label.DEGEN in lab:
        arts = {w for w in reduced if _has(labels, w, Label.MIN_ART)}
        if not arts:
            return 10
        near = sorted(g.adj[u] & arts)
        for a in near:
            if not (g.adj[a] & arts):
                return 3
        for a in near:
            if sum(1 for x in g.adj[a] & reduced if _has(labels, x, Label.DEGEN)) < 2:
                return 9
        for a in near:
            sub = reduced - {u}
            got = labels_of(g, sub, root, cache)
            if got is not None:
                degen = sum(1 for x in g.adj[a] & sub if _has(got[0], x, Label.DEGEN))
                if degen < 2:
                    return 9
        n_art = len(near)
        for a in near:
            tier = next((t for t in reversed(tiers) if a in t.vertices), None)
            if tier is None or u in tier.vertices:
                continue
            if a in articulations(g, tier.vertices) and n_art == 1:
                return 6
        sub = reduced - {u}
        sub_labels = labels_of(g, sub, root, cache)
        if sub_labels is not None:
            for z in sorted(g.adj[u] & reduced):
                if _has(labels, z, Label.MIN_LEAF) and leaf_admissible(g, sub, sub_labels[0], root, z, cache):
                    return 7
        chain = forced_chain(g, reduced, u, root)
        if _degenerates_art(g, reduced, labels, chain, root, cache):
            return 4
        rest = reduced - set(chain)
        tail = chain[-1]
        tail_labels = labels_of(g, rest, root, cache)
        if tail_labels is not None:
            for z in sorted(g.adj[tail] & rest):
                if _has(labels, z, Label.MIN_LEAF) and leaf_admissible(g, rest, tail_labels[0], root, z, cache):
                    return 8
        return None
    if Label.MIN_LEAF in lab:
        if leaf_admissible(g, reduced, labels, root, u, cache):
            return 5
        return None
    if lab & {Label.ART_N, Label.INTER, Label.NEUTRAL}:
        return 11
    return None


def closing_step_ok(s: Scene, v: int, u: int) -> bool:
    """The root may only be entered as the very last step of the tour."""
    if u != s.root or u == v:
        return True
    return (
        len(s.live) == 2
        and s.graph.has_edge(v, u)
        and s.degree(v) == 1
        and s.degree(u) == 1
    )


def rank_successors(s: Scene, v: int, st: MappingState) -> list[tuple[int, int]]:
    """Admissible successors of v as (vertex, priority), best first."""
    ranked = []
    for u in sorted(s.live_neighbors(v)):
        if u == s.root and u != v:
            if closing_step_ok(s, v, u):
                ranked.append((u, PRIORITY[Label.NEUTRAL], 11))
            continue
        rule = successor_allowed(s, v, u, st.label_cache)
        if rule is None:
            continue
        reduced = set(s.live) - {v}
        got = None
        if s.root != v:
            got = labels_of(s.graph, reduced, s.root, st.label_cache)
        if got is None:
            tiers = induce_tiers(s.graph, s.live, v) if s.root == v else []
            labels = label_vertices(s.graph, reduced, tiers)
        else:
            labels = got[0]
        prio = max((PRIORITY.get(x, 0) for x in labels.get(u, ())), default=0)
        ranked.append((u, prio, rule))
    # fallback class last regardless of label, then by priority
    buckets: dict[tuple[bool, int], list[tuple[int, int]]] = {}
    for u, prio, rule in ranked:
        buckets.setdefault((rule == 11, -prio), []).append((u, prio))
    out = []
    for key in sorted(buckets):
        group = buckets[key]
        st.rng.shuffle(group)
        out.extend(group)
    return out


# -- select and undo -------------------------------------------------------

def _append(st: MappingState, a: int, b: int) -> None:
    st.le.append(EdgeRecord(a, b, False, st.seq, "mapped"))
    st.seq += 1
    for w in (a, b):
        if incidence(st.le, w) > 2:
            for i, r in enumerate(st.le):
                if r.touches(w):
                    del st.le[i]
                    break
    if len(st.le) > len(st.best_le):
        st.best_le = list(st.le)


def select(g: Graph, s: Scene, v: int, u: int, st: MappingState) -> None:
    s.live.discard(v)
    st.visited.add(v)
    st.selects += 1
    if v == s.root and v != u:
        s.live.add(v)
    last = s.last.get(v)
    # the final step (v == u) still records its incoming edge
    if last is not None and last != v and g.has_edge(last, v):
        _append(st, last, v)
    s.last[u] = v


@dataclass(frozen=True)
class Snapshot:
    live: frozenset
    root: int
    current: int | None
    last: tuple
    split: tuple
    labels: tuple
    tiers: tuple
    contexts: int
    le: tuple
    visited: frozenset
    seq: int


def snapshot(s: Scene, st: MappingState) -> Snapshot:
    return Snapshot(
        frozenset(s.live), s.root, s.current,
        tuple(sorted(s.last.items(), key=lambda kv: kv[0])),
        tuple(sorted(s.split.items())),
        tuple(sorted(s.labels.items(), key=lambda kv: kv[0])),
        tuple(s.tiers), s.contexts,
        tuple(st.le), frozenset(st.visited), st.seq,
    )


def restore(s: Scene, st: MappingState, snap: Snapshot) -> None:
    s.live = set(snap.live)
    s.root = snap.root
    s.current = snap.current
    s.last = dict(snap.last)
    s.split = dict(snap.split)
    s.labels = dict(snap.labels)
    s.tiers = list(snap.tiers)
    s.contexts = snap.contexts
    st.le = list(snap.le)
    st.visited = set(snap.visited)
    st.seq = snap.seq


# -- the walk --------------------------------------------------------------

def pendant_piece(s: Scene, v: int):
    """The piece to detour through when v's removal exposes cut vertices.

    Returns (vertices, cut vertex) or None.
    """
    g = s.graph
    reduced = set(s.live) - {v}
    root = s.root
    near = {root} | (g.adj[root] & s.live)
    for info in component_infos(g, reduced):
        if info.hn == 1 and info.creatable and info.vertices & near:
            return info.vertices, next(iter(info.boundary))
    return None


def mapping(s: Scene, g: Graph, st: MappingState, v: int) -> list[EdgeRecord]:
    s.current = v
    if len(s.live) == 1:
        select(g, s, v, v, st)
        return st.le
    if s.split.get(v, True) and articulations(g, set(s.live) - {v}):
        if not check_constraints_1_2(s, v):
            sync_error(st, True)
        piece = pendant_piece(s, v)
        if piece is not None:
            _detour(s, g, st, v, piece)
            return st.le
        # nothing to detour through: handle v like an ordinary vertex
        s.split[v] = False
    if s.live_neighbors(v):
        s.split[v] = False
        for u, _ in rank_successors(s, v, st):
            snap = snapshot(s, st)
            try:
                label = "".join(sorted(x.value for x in s.labels.get(u, ())))
                st.trace.append((v, u, label))
                select(g, s, v, u, st)
                mapping(s, g, st, u)
                return st.le
            except DiscardScene:
                restore(s, st, snap)
                raise
            except MapError:
                restore(s, st, snap)
                sync_error(st, False)
        sync_error(st, True)
    else:
        s.live.discard(v)
        last = s.last.get(v)
        if last is not None and last != v and g.has_edge(last, v):
            _append(st, last, v)
    return st.le


def _detour(s: Scene, g: Graph, st: MappingState, v: int, piece) -> None:
    vertices, cut = piece
    old_root = s.root
    s.live.discard(v)
    star = Scene(graph=g, live=set(vertices) | {old_root, cut}, root=cut, current=old_root)
    outer_eps = st.eps
    before = set(s.live)
    try:
        context_change(star, cut, old_root)
        st.eps = 0
        try:
            mapping(star, g, st, old_root)
        finally:
            st.eps = outer_eps
        s.live -= st.visited
        if cut in s.live:
            s.split[v] = False
        if not (before - s.live - {v, cut}):
            s.split[v] = False
        s.live |= {v, cut}
        s.root = cut
        context_change(s, cut, v)
        mapping(s, g, st, v)
        if not s.live_neighbors(v):
            s.live.discard(v)
    except (MapError, Disconnected):
        sync_error(st, True)


# -- one attempt -----------------------------------------------------------

@dataclass
class MappingResult:
    root: int
    status: str  # complete | failed | aborted
    le: list[EdgeRecord]
    kappa: int
    max_eps: int
    m: int
    selects: int
    trace: list[tuple[int, int, str]]


def map_attempt(g: Graph, root: int, seed: int = 0, eta: int | None = None, m: int | None = None) -> MappingResult:
    st = MappingState.for_graph(g, seed, eta, m)
    s = Scene.full(g, root)
    status = "complete"
    try:
        context_change(s, root, root)
        mapping(s, g, st, root)
    except Disconnected:
        status = "failed"
    except AbortMapping:
        status = "aborted"
    except MapError:
        status = "failed"
    le = st.le if status == "complete" else st.best_le
    return MappingResult(root, status, list(le), st.kappa, st.max_eps, st.m, st.selects, st.trace)


def is_connected_graph(g: Graph) -> bool:
    return len(components(g, range(g.n))) <= 1
