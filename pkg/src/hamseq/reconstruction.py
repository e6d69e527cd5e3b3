"""Phase two: grow two paths from a seed edge until they cover the graph.

The edge sequence from phase one is used as an overlay. Each step first
runs the active tip along overlay records (synchronizing them), then picks
a successor among the tip's unvisited neighbours, preferring those the
overlay already reaches. Inconsistent states are reported to the tolerance
policy, which decides how far to back up, whether to re-attach somewhere
else, or whether to restart from another seed edge.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .graph import Graph, articulations, components
from .oracle import Mode
from .policy import Action, Failure, PolicyConfig, PolicyState, Rspn, run_policy
from .records import EdgeRecord
from .scene import component_infos, constraint_violations


class ReconError(Exception):
    def __init__(self, failure: Failure, options_u: list[int] | None = None):
        super().__init__(failure.kind)
        self.failure = failure
        self.options_u = options_u


@dataclass(frozen=True)
class Snapshot:
    live: frozenset
    le: tuple
    p1: tuple
    p2: tuple
    active: int
    dead: tuple
    d: int
    removals: tuple
    seq: int
    progress: int


@dataclass
class Frame:
    before: Snapshot
    option: int
    tip: int
    options_u: list[int] | None = None


@dataclass
class Retry:
    option: int
    tip: int
    options_u: list[int] | None
    attach: bool = False


@dataclass(frozen=True)
class Option:
    u: int
    remove: EdgeRecord | None = None
    markers: bool = False
    dead: bool = False


@dataclass
class Outcome:
    status: str  # done | aborted
    sequence: list[int] | None
    le: list[EdgeRecord]
    mu_x: float
    expansions: list[int]
    steps: int
    trace: list[dict] = field(default_factory=list)


class ReconState:
    def __init__(self, g: Graph, le, mode: Mode = Mode.CIRCUIT, config: PolicyConfig | None = None,
                 relaxed: bool | None = None):
        self.g = g
        self.n = g.n
        self.mode = Mode(mode)
        self.config = config or PolicyConfig()
        self.initial = [EdgeRecord(r.a, r.b, False, i, r.kind) for i, r in enumerate(le)]
        self.s_initial = len(self.initial)
        if relaxed is None:
            relaxed = self.mode is Mode.CIRCUIT or not self.config.on(22)
        self.relaxed = relaxed if self.mode is Mode.PATH else False
        self.expansions: list[int] = []
        self.phi: tuple[int, int] | None = None
        self.frames: list[Frame] = []
        self.retry: Retry | None = None
        self.steps = 0
        self.expansion_steps = 0
        self.delta = 0
        self._reset_paths()

    # -- state ---------------------------------------------------------

    def _reset_paths(self) -> None:
        self.le: list[EdgeRecord] = [r for r in self.initial]
        self.paths: list[list[int]] = [[], []]
        self.live: set[int] = set(range(self.n))
        self.active = 0
        self.dead = [False, False]
        self.d = 0
        self.removals: list[tuple[int, int]] = []
        self.seq = len(self.initial)
        self.progress = 0
        self.gained = 0

    def snapshot(self) -> Snapshot:
        return Snapshot(
            frozenset(self.live), tuple(self.le), tuple(self.paths[0]), tuple(self.paths[1]),
            self.active, tuple(self.dead), self.d, tuple(self.removals), self.seq, self.progress,
        )

    def restore(self, snap: Snapshot) -> None:
        self.live = set(snap.live)
        self.le = list(snap.le)
        self.paths = [list(snap.p1), list(snap.p2)]
        self.active = snap.active
        self.dead = list(snap.dead)
        self.d = snap.d
        self.removals = list(snap.removals)
        self.seq = snap.seq
        self.progress = snap.progress

    def digest(self) -> str:
        state = {
            "live": sorted(self.live),
            "le": [r.to_list() for r in self.le],
            "p1": self.paths[0],
            "p2": self.paths[1],
            "active": self.active,
            "dead": self.dead,
            "d": self.d,
            "removals": [list(x) for x in self.removals],
            "seq": self.seq,
        }
        blob = json.dumps(state, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def visited(self) -> set[int]:
        return set(self.paths[0]) | set(self.paths[1])

    def unvisited(self) -> set[int]:
        return set(range(self.n)) - self.visited()

    def tip(self, i: int) -> int | None:
        return self.paths[i][-1] if self.paths[i] else None

    def tips(self) -> tuple[int, ...]:
        return tuple(self.tip(i) for i in (0, 1) if not self.dead[i] and self.paths[i])

    def alive(self, i: int) -> bool:
        return bool(self.paths[i]) and not self.dead[i]

    def depth(self) -> int:
        return len(self.frames) + (1 if self.retry is not None else 0)

    def phi_tips(self) -> tuple[int, int]:
        assert self.phi is not None
        return self.phi

    def dstar(self, w: int) -> int:
        """Overlay degree: live unsynchronized records at w.

        A self-marker counts once, so the doubled marker of an unmapped
        vertex gives it degree 2.
        """
        if w not in self.live:
            return 0
        n = 0
        for r in self.le:
            if r.sync:
                continue
            if r.a == r.b:
                n += r.a == w
                continue
            if r.a == w and r.b in self.live:
                n += 1
            if r.b == w and r.a in self.live:
                n += 1
        return n

    def exactness(self) -> float:
        if self.s_initial == 0:
            return 1.0
        lost = sum(1 for _, kind_mapped in self.removals if kind_mapped)
        return 1.0 - lost / self.s_initial

    # -- seeding -------------------------------------------------------

    def phi_for(self, x1: int) -> tuple[int, int] | None:
        for r in self.initial:
            if r.touches(x1) and r.a != r.b:
                return (x1, r.other(x1))
        nbrs = sorted(self.g.adj[x1])
        return (x1, nbrs[0]) if nbrs else None

    def initial_phi(self, v0: int) -> tuple[int, int] | None:
        for r in self.initial:
            if r.touches(v0) and r.a != r.b:
                return (r.other(v0), v0)
        nbrs = sorted(self.g.adj[v0])
        return (nbrs[0], v0) if nbrs else None

    def start(self, phi: tuple[int, int]) -> None:
        x1, x2 = phi
        self._reset_paths()
        self.phi = phi
        self.expansions.append(x1)
        self.frames = []
        self.retry = None
        self.expansion_steps = 0
        self.paths = [[x1], [x2]]
        seeded = False
        for i, r in enumerate(self.le):
            if {r.a, r.b} == {x1, x2}:
                self.le[i] = EdgeRecord(r.a, r.b, True, r.seq, "seed")
                seeded = True
                break
        if not seeded:
            self.le.append(EdgeRecord(x1, x2, True, self.seq, "seed"))
            self.seq += 1
        self.progress = 2
        self.apply_removal_cases()

    def lookahead_removals(self, phi: tuple[int, int]) -> int:
        probe = ReconState(self.g, self.initial, self.mode, self.config, self.relaxed)
        probe.start(phi)
        return sum(1 for _, mapped in probe.removals if mapped)

    # -- record bookkeeping ----------------------------------------------

    def _remove(self, rec: EdgeRecord) -> None:
        self.le.remove(rec)
        if rec.kind != "marker":
            self.removals.append((rec.seq, rec.kind == "mapped"))

    def _purge(self, w: int) -> None:
        # w just left the live scene: its unsynchronized records are dead
        for r in [r for r in self.le if not r.sync and r.touches(w)]:
            self._remove(r)

    def _consume(self, i: int, w: int, rec: EdgeRecord | None, kind: str) -> None:
        """Move tip i onto w, synchronizing rec or adding a junction record."""
        t = self.tip(i)
        if rec is not None:
            self.le[self.le.index(rec)] = rec.synced()
        else:
            self.le.append(EdgeRecord(t, w, True, self.seq, kind))
            self.seq += 1
        self.paths[i].append(w)
        self.live.discard(t)
        self._purge(t)

    # -- consistency ---------------------------------------------------

    def _fail(self, kind: str, region, tip: int | None) -> ReconError:
        region = frozenset(region)
        cuts = frozenset(articulations(self.g, self.live)) if self.live else frozenset()
        other = [t for t in self.tips() if t != tip]
        overlap = bool(
            other and region
            and any(self.g.adj[x] & region or x in region for x in other)
            and tip is not None and not (self.g.adj[tip] & region or tip in region)
        )
        return ReconError(Failure(kind, region, tip, self.depth(), cuts, overlap))

    def check(self, moved_from: int | None = None, tip: int | None = None) -> None:
        """Raise ReconError if the remaining scene cannot be completed."""
        g, live = self.g, self.live
        unv = self.unvisited()
        if not unv:
            return
        tips = set(self.tips())
        if not tips:
            raise self._fail("constraint", unv, tip)
        circuit = self.mode is Mode.CIRCUIT
        comps = components(g, live)
        for comp in comps:
            if not comp & tips or (circuit and len(comps) > 1):
                raise self._fail("constraint", comp - tips or comp, tip)
        thin = []
        for u in unv:
            deg = len(g.adj[u] & live)
            if circuit and deg < 2:
                raise self._fail("constraint", {u}, tip)
            if deg <= 1:
                thin.append(u)
        if not circuit and len(thin) > len(tips):
            raise self._fail("constraint", thin, tip)
        if circuit:
            for t in tips:
                if not g.adj[t] & unv:
                    raise self._fail("constraint", {t}, tip)
        allowance = 0 if (circuit or not self.relaxed) else len(tips)
        if moved_from is not None:
            others = sorted(tips - {tip}) if tip is not None else sorted(tips)
            v0 = others[0] if others else tip
            first, second = constraint_violations(g, live | {moved_from}, moved_from, v0)
            if len(first) > allowance:
                raise self._fail("constraint", first[0].vertices, tip)
            if circuit and second:
                raise self._fail("constraint", second[0].vertices, tip)
        cuts = articulations(g, live)
        if not cuts:
            return
        if circuit and cuts & tips and len(live) > 2:
            raise self._fail("constraint", cuts & tips, tip)
        stray = [info for info in component_infos(g, live, cuts)
                 if info.hn == 1 and not info.vertices & tips]
        if len(stray) > (0 if circuit else len(tips)):
            raise self._fail("constraint", stray[0].vertices, tip)

    # -- one step ------------------------------------------------------

    def walk_pv(self, i: int) -> int:
        """Follow overlay records from tip i; return the tip reached."""
        unv = self.unvisited()
        while True:
            t = self.tip(i)
            nxt = None
            for r in sorted(self.le, key=lambda r: r.seq):
                if r.sync or r.a == r.b or not r.touches(t):
                    continue
                w = r.other(t)
                if w in unv and w in self.live:
                    nxt = (r, w)
                    break
            if nxt is None:
                return t
            r, w = nxt
            self._consume(i, w, r, "mapped")
            unv.discard(w)
            self.check(moved_from=t, tip=w)

    def candidate_partition(self, v: int):
        """Split v's unvisited neighbours by overlay degree.

        Unmapped neighbours get a doubled self-marker so they sit in the
        second group alongside the degree-2 ones.
        """
        s0, s1, s2 = [], [], []
        unv = self.unvisited()
        for w in sorted(self.g.adj[v] & unv):
            if w not in self.live:
                continue
            recs = [r for r in sorted(self.le, key=lambda r: r.seq)
                    if not r.sync and r.a != r.b and r.touches(w) and r.other(w) in self.live]
            deg = len(recs)
            if deg == 0:
                for _ in range(2):
                    marker = EdgeRecord(w, w, False, self.seq, "marker")
                    self.seq += 1
                    self.le.append(marker)
                    s0.append(marker)
            elif deg == 1:
                s1.extend(recs)
            else:
                s2.extend(recs)
        return s0, s1, s2 + s0

    def options(self, i: int) -> list[Option]:
        v = self.tip(i)
        s0, s1, s2 = self.candidate_partition(v)
        opts: list[Option] = []
        seen = set()
        reachable = self.g.adj[v] & self.unvisited()

        def target(r: EdgeRecord) -> int | None:
            # the record's endpoint that v can step onto
            for w in (r.a, r.b):
                if w in reachable:
                    return w
            return None

        for r in s1:
            w = target(r)
            if w is None or w in seen:
                continue
            seen.add(w)
            opts.append(Option(w))
        by_vertex: dict[int, list[EdgeRecord]] = {}
        for r in s2:
            if r.kind == "marker":
                continue
            w = target(r)
            if w is not None:
                by_vertex.setdefault(w, []).append(r)
        for w in sorted(by_vertex):
            recs = by_vertex[w]
            opts.append(Option(w, remove=recs[0]))
            if len(recs) > 1:
                opts.append(Option(w, remove=recs[1]))
        for w in sorted({r.a for r in s0}):
            opts.append(Option(w, markers=True))
        opts = [o for o in opts if self._lookahead_ok(i, o.u)]
        if (self.mode is Mode.PATH and self.relaxed and self.config.on(21)
                and self.alive(1 - i) and self.d < 2):
            opts.append(Option(v, dead=True))
        return opts

    def _lookahead_ok(self, i: int, u: int) -> bool:
        if self.mode is Mode.PATH and self.relaxed:
            return True
        v = self.tip(i)
        others = [t for t in self.tips() if t != v]
        v0 = others[0] if others else u
        first, second = constraint_violations(self.g, self.live - {v}, u, v0)
        return not first and not second

    def apply_option(self, i: int, opt: Option, attach: bool) -> None:
        v = self.tip(i)
        if opt.dead:
            self.dead[i] = True
            self.d += 1
            self.delta = self.d
            self.live.discard(v)
            self._purge(v)
        else:
            if opt.remove is not None:
                self._remove(opt.remove)
            for r in [r for r in self.le if r.kind == "marker"]:
                self.le.remove(r)
            self._consume(i, opt.u, None, "attach" if attach else "junction")
        for r in [r for r in self.le if r.kind == "marker"]:
            self.le.remove(r)

    def apply_removal_cases(self) -> None:
        tips = [self.tip(i) for i in (0, 1) if self.alive(i)]
        unv = self.unvisited()
        # III: the two tips may only meet once everything else is covered
        if unv and len(tips) == 2:
            for r in [r for r in self.le if not r.sync and {r.a, r.b} == set(tips)]:
                self._remove(r)
        if self.mode is Mode.PATH and self.relaxed:
            return
        for t in tips:
            others = [x for x in tips if x != t]
            v0 = others[0] if others else t
            for r in [r for r in self.le if not r.sync and r.a != r.b and r.touches(t)]:
                a = r.other(t)
                if a not in unv:
                    continue
                rest = self.live - {t, a}
                # I: entering a would split off vertices the other tip can't reach
                split = [c for c in components(self.g, rest) if v0 not in c] if rest else []
                if self.mode is Mode.CIRCUIT and split and rest != {v0}:
                    self._remove(r)
                    continue
                # II: one-step lookahead on the scene without t and a
                first, second = constraint_violations(self.g, self.live - {t}, a, v0)
                if first or (self.mode is Mode.CIRCUIT and second):
                    self._remove(r)

    def done(self) -> bool:
        if self.unvisited():
            return False
        if self.mode is Mode.PATH:
            return True
        t1, t2 = self.paths[0][-1], self.paths[1][-1]
        return self.n >= 3 and self.g.has_edge(t1, t2)

    def sequence(self) -> list[int]:
        return list(reversed(self.paths[1])) + self.paths[0]

    def step(self, option: int = 0, tip: int | None = None, attach: bool = False) -> str:
        """Advance one state. On failure the state is left as it was."""
        i = self.active if tip is None else tip
        before = self.snapshot()
        frame = Frame(before, option, i)
        self.steps += 1
        self.expansion_steps += 1
        try:
            if not self.alive(i):
                raise self._fail("dead_end", set(), self.tip(i))
            self.walk_pv(i)
            if self.done():
                self.frames.append(frame)
                return "done"
            if not self.unvisited():
                raise self._fail("closure", set(self.tips()), self.tip(i))
            opts = self.options(i)
            frame.options_u = [o.u if not o.dead else -1 for o in opts]
            if option >= len(opts):
                raise ReconError(
                    self._fail("dead_end", {self.tip(i)}, self.tip(i)).failure, frame.options_u
                )
            v = self.tip(i)
            self.apply_option(i, opts[option], attach)
            self.apply_removal_cases()
            self.check(moved_from=None if opts[option].dead else v, tip=self.tip(i))
            if self.done():
                self.frames.append(frame)
                return "done"
        except ReconError as err:
            if err.options_u is None:
                err.options_u = frame.options_u
            self.restore(before)
            raise
        self.frames.append(frame)
        other = 1 - i
        self.active = other if self.alive(other) else i
        covered = len(self.visited())
        self.gained = max(covered - self.progress, 0)
        if self.gained:
            self.progress = covered
            return "progress"
        return "ok"

    def undo_states(self, k: int) -> list[Frame]:
        """Pop k frames and return to the state before the oldest of them."""
        popped = []
        for _ in range(min(k, len(self.frames))):
            popped.append(self.frames.pop())
        if popped:
            self.restore(popped[-1].before)
        return popped

    # -- retry bookkeeping used by the policy ----------------------------

    def _retry_from(self, frame: Frame) -> Retry:
        return Retry(frame.option + 1, frame.tip, frame.options_u)

    def _climb(self) -> None:
        # step back over decision points with no options left
        while self.retry is not None:
            r = self.retry
            if r.options_u is None or r.option < len(r.options_u):
                return
            if not self.frames:
                self.retry = None
                return
            (frame,) = self.undo_states(1)
            self.retry = self._retry_from(frame)

    def note_failure(self, err: ReconError, option: int, tip: int) -> None:
        if err.options_u is None:
            # the state itself was bad: blame the decision that produced it
            if self.frames:
                (frame,) = self.undo_states(1)
                self.retry = self._retry_from(frame)
            else:
                self.retry = None
        else:
            self.retry = Retry(option + 1, tip, err.options_u)
        self._climb()

    def undo(self, k: int) -> None:
        for _ in range(max(k - 1, 0)):
            if not self.frames:
                break
            (frame,) = self.undo_states(1)
            self.retry = self._retry_from(frame)
            self._climb()

    def find_attach(self, region: frozenset[int], max_back: int):
        g = self.g
        near = set(region)
        for x in region:
            near |= g.adj[x]
        points = []
        if self.retry is not None:
            points.append((self.retry.options_u, self.retry.option, self.retry.tip))
        for frame in reversed(self.frames):
            points.append((frame.options_u, frame.option + 1, frame.tip))
        for k, (opts, start, tip) in enumerate(points[:max_back], start=1):
            if not opts:
                continue
            for idx in range(start, len(opts)):
                u = opts[idx]
                if u >= 0 and u in near:
                    return k, idx, (tip, u)
        return None

    def generators(self) -> set[int]:
        base = len(articulations(self.g, self.live))
        return {w for w in self.live if len(articulations(self.g, self.live - {w})) > base}


# -- driver ----------------------------------------------------------------

def _phase_caps(rs: ReconState) -> tuple[int, int]:
    n = max(rs.n, 1)
    return rs.config.states_per_expansion * n, rs.config.total_states * n * 4


def reconstruct(rs: ReconState, ps: PolicyState, rspn: Rspn | None = None, v0: int = 0,
                trace: bool = False) -> Outcome:
    rspn = rspn or Rspn()
    log: list[dict] = []
    n = rs.n
    if n == 1:
        return Outcome("done", [0], [], 1.0, [], 0, log)
    phi = rs.initial_phi(v0)
    if phi is None:
        return Outcome("aborted", None, list(rs.le), rs.exactness(), [], 0, log)
    rs.start(phi)
    ps.consistent(progress=True)
    per_expansion, total = _phase_caps(rs)

    def emit(action: str, edge=None, tip=None):
        if trace:
            log.append({
                "state": rs.steps, "tip": tip, "action": action,
                "edge": list(edge) if edge else None,
                "gamma": ps.gamma, "t": ps.t, "terms": len(ps.a_terms), "mu_x": rs.exactness(),
            })

    while True:
        if rs.steps >= total:
            emit("ABORT")
            return Outcome("aborted", None, list(rs.le), rs.exactness(), list(rs.expansions), rs.steps, log)
        forced = rs.expansion_steps >= per_expansion
        retry = rs.retry
        option = retry.option if retry else 0
        tip = retry.tip if retry else None
        attach = retry.attach if retry else False
        if not forced:
            try:
                used_tip = rs.active if tip is None else tip
                result = rs.step(option, tip, attach)
                rs.retry = None
                # every newly covered vertex is one more consistent state
                for _ in range(max(rs.gained, 1) if result == "progress" else 1):
                    ps.consistent(progress=result == "progress")
                emit("STEP", (rs.paths[used_tip][-2], rs.paths[used_tip][-1]) if len(rs.paths[used_tip]) > 1 else None, used_tip)
                if result == "done":
                    seq = rs.sequence()
                    return Outcome("done", seq, list(rs.le), rs.exactness(), list(rs.expansions), rs.steps, log)
                continue
            except ReconError as err:
                rs.note_failure(err, option, used_tip)
                failure = err.failure
        else:
            failure = Failure("budget", frozenset(), None, rs.depth(), frozenset(articulations(rs.g, rs.live)))
        actions = run_policy(ps, rspn, rs, failure, force_expansion=forced)
        outcome = _apply(rs, ps, actions, emit)
        if outcome == "abort":
            return Outcome("aborted", None, list(rs.le), rs.exactness(), list(rs.expansions), rs.steps, log)


def _apply(rs: ReconState, ps: PolicyState, actions: list[Action], emit) -> str | None:
    for act in actions:
        emit(act.kind, act.edge or act.phi, act.tip)
        if act.kind == "ABORT":
            return "abort"
        if act.kind == "UNDO":
            rs.undo(act.k)
        elif act.kind == "ADD_SYNC_EDGE" and rs.retry is not None and act.option is not None:
            rs.retry = Retry(act.option, rs.retry.tip, rs.retry.options_u, attach=True)
        elif act.kind == "PIN_TIP" and rs.retry is not None:
            other = 1 - rs.retry.tip
            if rs.alive(other):
                rs.retry = Retry(0, other, None)
        elif act.kind == "NEW_EXPANSION" and act.phi is not None:
            rs.start(act.phi)
            ps.reset_expansion()
            ps.consistent(progress=True)
            return None
    if rs.retry is None and not rs.frames:
        # nothing left to retry in this expansion and no restart issued
        return "abort"
    return None
