"""Ground truth: the deletion-walk validator and two exact solvers.

Both exact solvers return the lexicographically smallest witness, so their
outputs can be compared element by element, not just for existence.
"""

from __future__ import annotations

import enum
from collections.abc import Sequence

from .errors import CapExceeded, InvalidParams
from .graph import Graph, count_components


class Mode(str, enum.Enum):
    PATH = "path"
    CIRCUIT = "circuit"


DEFAULT_CAP = 20


def closes(g: Graph, seq: Sequence[int]) -> bool:
    """Whether seq, already a Hamiltonian path, also closes into a circuit."""
    if len(seq) == 1:
        return True
    return len(seq) >= 3 and g.has_edge(seq[-1], seq[0])


def validate(g: Graph, seq: Sequence[int], mode: Mode = Mode.PATH) -> bool:
    """Walk seq deleting each vertex; reject on a cut, a gap, or leftovers."""
    live = set(range(g.n))
    prev = None
    for v in seq:
        if v not in live:
            return False
        if prev is not None and not g.has_edge(prev, v):
            return False
        before = count_components(g, live)
        live.discard(v)
        if count_components(g, live) > before:
            live.add(v)
            break
        prev = v
    if live or not seq:
        return False
    if Mode(mode) is Mode.CIRCUIT:
        return closes(g, seq)
    return True


def adjacency_walk(g: Graph, seq: Sequence[int], mode: Mode = Mode.PATH) -> bool:
    """Plain definitional check: a permutation with consecutive adjacency."""
    if sorted(seq) != list(range(g.n)) or not seq:
        return False
    if any(not g.has_edge(a, b) for a, b in zip(seq, seq[1:])):
        return False
    return Mode(mode) is Mode.PATH or closes(g, seq)


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _masks(g: Graph) -> list[int]:
    return [sum(1 << w for w in g.adj[v]) for v in range(g.n)]


def dp_solve(g: Graph, mode: Mode = Mode.PATH) -> list[int] | None:
    """Subset DP over 'which vertices can start a Hamiltonian path of mask'."""
    n = g.n
    if n == 0:
        return None
    if n == 1:
        return [0]
    adj = _masks(g)
    if Mode(mode) is Mode.PATH:
        starts = _start_sets(adj, n, (1 << n) - 1, None)
        full = (1 << n) - 1
        if not starts[full]:
            return None
        cur = (starts[full] & -starts[full]).bit_length() - 1
        seq = [cur]
        rest = full ^ (1 << cur)
        while rest:
            cand = adj[cur] & starts[rest]
            cur = (cand & -cand).bit_length() - 1
            seq.append(cur)
            rest ^= 1 << cur
        return seq
    if n < 3:
        return None
    universe = ((1 << n) - 1) ^ 1
    starts = _start_sets(adj, n, universe, adj[0])
    if not adj[0] & starts[universe]:
        return None
    seq = [0]
    cur, rest = 0, universe
    while rest:
        cand = adj[cur] & starts[rest]
        cur = (cand & -cand).bit_length() - 1
        seq.append(cur)
        rest ^= 1 << cur
    return seq


def _start_sets(adj: list[int], n: int, universe: int, end_ok: int | None) -> list[int]:
    # starts[mask] = bitset of w in mask such that some Hamiltonian path of
    # g[mask] starts at w (and, if end_ok is given, ends inside end_ok).
    starts = [0] * (universe + 1)
    for v in _bits(universe):
        if end_ok is None or end_ok >> v & 1:
            starts[1 << v] = 1 << v
    for mask in range(1, universe + 1):
        if mask & ~universe or not mask & (mask - 1):
            continue
        acc = 0
        for w in _bits(mask):
            if adj[w] & starts[mask ^ (1 << w)]:
                acc |= 1 << w
        starts[mask] = acc
    return starts


def backtrack_solve(g: Graph, mode: Mode = Mode.PATH) -> list[int] | None:
    """Depth-first search in increasing vertex order with sound pruning."""
    n = g.n
    if n == 0:
        return None
    if n == 1:
        return [0]
    circuit = Mode(mode) is Mode.CIRCUIT
    if circuit and n < 3:
        return None
    adj = [sorted(g.adj[v]) for v in range(n)]
    seq: list[int] = []
    used = [False] * n

    def feasible(cur: int) -> bool:
        rest = {v for v in range(n) if not used[v]}
        if not rest:
            return True
        pool = rest | {cur}
        seen = {cur}
        stack = [cur]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in pool and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(pool):
            return False
        if circuit:
            ends = pool | {0}
            return all(sum(1 for y in adj[r] if y in ends) >= 2 for r in rest)
        thin = sum(1 for r in rest if sum(1 for y in adj[r] if y in pool) <= 1)
        return thin <= 1

    def extend(cur: int) -> bool:
        if len(seq) == n:
            return not circuit or g.has_edge(cur, 0)
        for w in adj[cur]:
            if used[w]:
                continue
            used[w] = True
            seq.append(w)
            if feasible(w) and extend(w):
                return True
            seq.pop()
            used[w] = False
        return False

    for s in ([0] if circuit else range(n)):
        used[s] = True
        seq.append(s)
        if feasible(s) and extend(s):
            return seq
        seq.pop()
        used[s] = False
    return None


def exact_solve(g: Graph, mode: Mode = Mode.PATH, cap: int = DEFAULT_CAP) -> list[int] | None:
    if g.n == 0:
        raise InvalidParams("empty graph")
    if g.n > cap:
        raise CapExceeded(f"n={g.n} exceeds cap {cap}")
    if g.n <= DEFAULT_CAP:
        return dp_solve(g, mode)
    return backtrack_solve(g, mode)
