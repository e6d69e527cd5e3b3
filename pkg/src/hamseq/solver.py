"""Run both phases end to end and collect a report."""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Any

from .errors import InvalidParams
from .graph import Graph, articulations, blocks
from .mapping import MappingResult, map_attempt
from .oracle import Mode, adjacency_walk, validate
from .policy import PolicyConfig, PolicyState, Rspn
from .reconstruction import Outcome, ReconState, reconstruct

STATUSES = ("found", "aborted", "mapping_failed")


@dataclass
class SolveReport:
    status: str
    sequence: list[int] | None
    mode: str
    n: int
    m: int
    mu_x: float
    kappa_total: int
    max_epsilon: int
    expansions: int
    gamma_final: float
    t_final: float
    restarts: int
    seed: int
    strategy_fires: dict[str, int] = field(default_factory=dict)
    attempts: list[dict[str, Any]] = field(default_factory=list)
    steps: int = 0
    elapsed_ms: float | None = None

    def to_dict(self) -> dict[str, Any]:
        d = {
            "status": self.status,
            "sequence": self.sequence,
            "mode": self.mode,
            "n": self.n,
            "m": self.m,
            "mu_x": round(self.mu_x, 12),
            "kappa_total": self.kappa_total,
            "max_epsilon": self.max_epsilon,
            "expansions": self.expansions,
            "gamma_final": round(self.gamma_final, 12),
            "t_final": round(self.t_final, 12),
            "restarts": self.restarts,
            "seed": self.seed,
            "strategy_fires": dict(sorted(self.strategy_fires.items(), key=lambda kv: int(kv[0]))),
            "attempts": self.attempts,
            "steps": self.steps,
        }
        if self.elapsed_ms is not None:
            d["elapsed_ms"] = self.elapsed_ms
        return d


@dataclass
class RunDetail:
    """Everything a caller might want beyond the report (DOT export, tests)."""

    report: SolveReport
    mapping: MappingResult | None = None
    outcome: Outcome | None = None
    recon: ReconState | None = None
    policy: PolicyState | None = None


def _attempt_seed(seed: int, i: int) -> str:
    return f"{seed}/{i}"


def run(g: Graph, mode: Mode | str = Mode.CIRCUIT, seed: int = 0, root: int | None = None,
        max_restarts: int | None = None, config: PolicyConfig | None = None,
        eta: int | None = None, m: int | None = None, trace: bool = False,
        timing: bool = False) -> RunDetail:
    mode = Mode(mode)
    config = config or PolicyConfig()
    n = g.n
    if n == 0:
        raise InvalidParams("graph has no vertices")
    if root is not None and not 0 <= root < n:
        raise InvalidParams(f"root {root} out of range")
    started = time.perf_counter()
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20 * n + 1000))

    def report(**kw) -> SolveReport:
        rep = SolveReport(mode=mode.value, n=n, m=g.m, seed=seed, **kw)
        if timing:
            rep.elapsed_ms = round((time.perf_counter() - started) * 1000.0, 3)
        return rep

    if n == 1:
        rep = report(status="found", sequence=[0], mu_x=1.0, kappa_total=0, max_epsilon=0,
                     expansions=0, gamma_final=0.0, t_final=0.0, restarts=0)
        return RunDetail(rep)

    tries = n if max_restarts is None else max(1, max_restarts)
    start = 0 if root is None else root
    attempts = []
    best: MappingResult | None = None
    chosen: MappingResult | None = None
    for i in range(tries):
        r = (start + i) % n
        res = map_attempt(g, r, seed=_attempt_seed(seed, i), eta=eta, m=m)
        attempts.append({"root": r, "kappa": res.kappa, "max_eps": res.max_eps, "status": res.status})
        if best is None or len(res.le) > len(best.le):
            best = res
        if res.status == "complete":
            chosen = res
            break
    base = chosen or best
    assert base is not None
    kappa_total = sum(a["kappa"] for a in attempts)
    max_eps = max(a["max_eps"] for a in attempts)

    rs = ReconState(g, base.le, mode, config)
    ps = PolicyState(config, seed, n)
    rspn = Rspn()
    outcome = reconstruct(rs, ps, rspn, v0=base.root, trace=trace)
    seq = outcome.sequence
    if outcome.status == "done":
        if not (validate(g, seq, mode) and adjacency_walk(g, seq, mode)):
            raise RuntimeError(f"reconstruction produced an invalid sequence {seq}")
        status = "found"
    elif chosen is None:
        status = "mapping_failed"
    else:
        status = "aborted"
    rep = report(
        status=status,
        sequence=seq if status == "found" else None,
        mu_x=outcome.mu_x,
        kappa_total=kappa_total,
        max_epsilon=max_eps,
        expansions=len(outcome.expansions),
        gamma_final=ps.gamma,
        t_final=ps.t,
        restarts=len(attempts) - 1,
        strategy_fires={str(k): v for k, v in sorted(ps.fires.items())},
        attempts=attempts,
        steps=outcome.steps,
    )
    return RunDetail(rep, base, outcome, rs, ps)


def _block_chain(g: Graph) -> list[tuple[frozenset[int], int | None, int | None]] | None:
    """Order the blocks into a chain, or None when no Hamiltonian path can exist.

    A path through a graph with cut vertices has to visit the blocks one after
    another, so the block-cut tree must itself be a path. Each entry is
    (block, entry cut vertex, exit cut vertex).
    """
    parts = blocks(g)
    cuts = articulations(g, range(g.n))
    owners: dict[int, list[int]] = {c: [] for c in cuts}
    for i, b in enumerate(parts):
        for c in b & cuts:
            owners[c].append(i)
    if any(len(o) != 2 for o in owners.values()):
        return None
    ends = [i for i, b in enumerate(parts) if len(b & cuts) <= 1]
    if any(len(b & cuts) > 2 for b in parts) or len(ends) != 2:
        return None
    chain = []
    prev_cut = None
    cur = min(ends)
    seen = set()
    while True:
        seen.add(cur)
        block = parts[cur]
        nxt_cut = next((c for c in sorted(block & cuts) if c != prev_cut), None)
        chain.append((block, prev_cut, nxt_cut))
        if nxt_cut is None:
            break
        cur = next(i for i in owners[nxt_cut] if i != cur)
        if cur in seen:
            return None
        prev_cut = nxt_cut
    return chain if len(chain) == len(parts) else None


def _sub(g: Graph, verts: list[int], extra: list[tuple[int, int]]) -> Graph:
    index = {v: i for i, v in enumerate(verts)}
    edges = [(index[a], index[b]) for a, b in g.edges() if a in index and b in index]
    return Graph(len(verts) + 1, edges + [(index[a], len(verts)) for a, _ in extra])


def _route_block(g: Graph, block: frozenset[int], enter: int | None, leave: int | None,
                 seed: int, kw: dict) -> tuple[list[int] | None, RunDetail | None]:
    """Hamiltonian path of one block entering at `enter` and leaving at `leave`.

    Interior blocks get a helper vertex joined to both cut vertices and are
    solved as a circuit; end blocks get a pendant on their cut vertex and are
    solved as a path. The helper is then cut back out.
    """
    verts = sorted(block)
    if len(verts) == 2:
        a, b = verts
        if enter is not None:
            first = enter
        elif leave is not None:
            first = a if b == leave else b
        else:
            first = a
        return [first, b if first == a else a], None
    anchors = [c for c in (enter, leave) if c is not None]
    h = _sub(g, verts, [(c, None) for c in anchors])
    helper = len(verts)
    mode = Mode.CIRCUIT if len(anchors) == 2 else Mode.PATH
    detail = run(h, mode, seed, **kw)
    seq = detail.report.sequence
    if seq is None:
        return None, detail
    if mode is Mode.CIRCUIT:
        k = seq.index(helper)
        seq = seq[k + 1:] + seq[:k]
    else:
        seq = seq[1:] if seq[0] == helper else seq[:-1]
    seq = [verts[i] for i in seq]
    if enter is not None and seq[0] != enter:
        seq.reverse()
    if leave is not None and seq[-1] != leave:
        seq.reverse()
    return seq, detail


def solve_split(g: Graph, seed: int = 0, timing: bool = False, **kw) -> SolveReport:
    """PATH mode with the instance cut apart at its articulation points."""
    if g.n <= 2 or not articulations(g, range(g.n)):
        return run(g, Mode.PATH, seed, timing=timing, **kw).report
    started = time.perf_counter()
    chain = _block_chain(g)
    details: list[RunDetail] = []
    attempts: list[dict[str, Any]] = []
    sequence: list[int] | None = []
    status = "found"
    if chain is None:
        sequence, status = None, "aborted"
    else:
        for i, (block, enter, leave) in enumerate(chain):
            part, detail = _route_block(g, block, enter, leave, seed, kw)
            if detail is not None:
                details.append(detail)
            attempts.append({"block": sorted(block),
                             "status": "found" if part is not None else detail.report.status,
                             "restarts": detail.report.restarts if detail else 0})
            if part is None:
                sequence = None
                status = detail.report.status if detail is not None else "aborted"
                break
            sequence.extend(part if i == 0 else part[1:])
    if sequence is not None and not (validate(g, sequence, Mode.PATH)
                                     and adjacency_walk(g, sequence, Mode.PATH)):
        raise RuntimeError(f"block stitching produced an invalid sequence {sequence}")
    reps = [d.report for d in details]
    fires: dict[str, int] = {}
    for r in reps:
        for k, v in r.strategy_fires.items():
            fires[k] = fires.get(k, 0) + v
    rep = SolveReport(
        status=status,
        sequence=sequence,
        mode=Mode.PATH.value,
        n=g.n,
        m=g.m,
        mu_x=sum(r.mu_x for r in reps) / len(reps) if reps else 1.0,
        kappa_total=sum(r.kappa_total for r in reps),
        max_epsilon=max((r.max_epsilon for r in reps), default=0),
        expansions=sum(r.expansions for r in reps),
        gamma_final=sum(r.gamma_final for r in reps),
        t_final=sum(r.t_final for r in reps),
        restarts=sum(r.restarts for r in reps),
        seed=seed,
        strategy_fires=dict(sorted(fires.items(), key=lambda kv: int(kv[0]))),
        attempts=attempts,
        steps=sum(r.steps for r in reps),
    )
    if timing:
        rep.elapsed_ms = round((time.perf_counter() - started) * 1000.0, 3)
    return rep


def solve(g: Graph, mode: Mode | str = Mode.CIRCUIT, seed: int = 0, **kw) -> SolveReport:
    split = kw.pop("split_blocks", False)
    if split and Mode(mode) is Mode.PATH:
        return solve_split(g, seed=seed, **kw)
    return run(g, mode, seed, **kw).report
