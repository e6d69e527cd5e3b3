"""Tolerance policy for the reconstruction phase.

The policy tracks two running rates per reconstruction run: a negativity
rate `gamma` (sum of f(a_i) over visited states) and a tolerance rate
`t = gamma + sum(t_i)`. While `t - gamma > 0` local repairs (undo and
re-attach) are allowed; once it drops to zero or below the run restarts
from a new seed edge, and eventually gives up.
"""

from __future__ import annotations

import json
import math
import random
from collections import Counter, deque
from dataclasses import dataclass, field, asdict
from typing import Any, Protocol

from .errors import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)

STRATEGY_IDS = tuple(range(1, 23))
DEFAULT_ORDER = (8, 18, 15, 16, 17, 19, 20, 4, 2, 1)
OVERLAP_FAMILY = (15, 16, 17)


def negativity_term(a: float) -> float:
    if not 0.0 <= a < 1.0:
        raise DomainError(f"a must lie in [0, 1), got {a}")
    return 1.0 / ((1.0 - a) * SQRT_2PI)


def ring(gamma: float, t: float) -> bool:
    return t - gamma > 0


def control_sigmoid(delta: float) -> float:
    return 1.0 / (1.0 + math.exp(-delta * delta))


def component_key(vertices) -> str:
    return ",".join(str(v) for v in sorted(vertices))


class RunningSum:
    """Compensated (Neumaier) accumulator."""

    __slots__ = ("total", "comp")

    def __init__(self) -> None:
        self.total = 0.0
        self.comp = 0.0

    def add(self, x: float) -> None:
        s = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - s) + x
        else:
            self.comp += (x - s) + self.total
        self.total = s

    @property
    def value(self) -> float:
        return self.total + self.comp


@dataclass
class PolicyConfig:
    enabled: dict[int, bool] = field(
        default_factory=lambda: {i: i not in (19, 20) for i in STRATEGY_IDS}
    )
    order: tuple[int, ...] = DEFAULT_ORDER
    consistent_bonus: float = 0.05
    failure_scale: float = 0.5
    t_min: float = -1.0
    t_max: float = 0.25
    delta_step: float = 0.25
    delta_decay: float = 0.5
    drastic_step: float = 1.0
    freq_coefficient: float = 0.1
    cost_threshold: float = 2.0
    cnode_cap: int = 8
    exhaust_a: float = 0.99
    abort_after: int = 3
    states_per_expansion: int = 12
    total_states: int = 60
    connect_budget: float = 1.0
    pool_fallback: bool = True

    def on(self, sid: int) -> bool:
        return bool(self.enabled.get(sid, False))

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["enabled"] = {str(k): v for k, v in sorted(self.enabled.items())}
        d["order"] = list(self.order)
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PolicyConfig:
        cfg = cls()
        known = set(cls.__dataclass_fields__)
        for key, value in data.items():
            if key not in known:
                raise ValueError(f"unknown policy setting {key!r}")
            if key == "enabled":
                merged = dict(cfg.enabled)
                merged.update({int(k): bool(v) for k, v in value.items()})
                value = merged
            elif key == "order":
                value = tuple(int(x) for x in value)
            setattr(cfg, key, value)
        return cfg

    @classmethod
    def load(cls, path: str) -> PolicyConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# -- RSPN bookkeeping ------------------------------------------------------

@dataclass
class AttachRecord:
    gamma_deltas: list[float] = field(default_factory=list)
    count: int = 0


@dataclass
class JEntry:
    members: frozenset[int]
    active: bool = True

    @property
    def frozen(self) -> bool:
        return len(self.members) == 1


@dataclass
class Rspn:
    nodeA: dict[str, AttachRecord] = field(default_factory=dict)
    nodeC: deque = field(default_factory=deque)
    nodeJ: list[JEntry] = field(default_factory=list)
    nodeN: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    rejected: list[str] = field(default_factory=list)

    def add_j(self, members) -> JEntry:
        taken = set()
        for entry in self.nodeJ:
            taken |= entry.members
        entry = JEntry(frozenset(members) - taken)
        if entry.members:
            self.nodeJ.append(entry)
        return entry

    def replace_j(self, index: int, members) -> bool:
        entry = self.nodeJ[index]
        if entry.frozen:
            self.rejected.append(f"J[{index}] frozen; kept {sorted(entry.members)}")
            return False
        entry.members = frozenset(members)
        return True

    def note_inconsistency(self, key: str, cap: int) -> None:
        if key in self.nodeC:
            return
        self.nodeC.append(key)
        while len(self.nodeC) > max(cap, 0):
            self.nodeC.popleft()

    def note_attach(self, key: str, dgamma: float) -> AttachRecord:
        rec = self.nodeA.setdefault(key, AttachRecord())
        rec.gamma_deltas.append(dgamma)
        rec.count += 1
        return rec


def attach_cost(rspn: Rspn, key: str, gamma_deltas=None, freq: int | None = None,
                coefficient: float = 0.1) -> float:
    rec = rspn.nodeA.get(key)
    if gamma_deltas is None:
        gamma_deltas = rec.gamma_deltas if rec else []
    if freq is None:
        freq = rec.count if rec else 0
    if not gamma_deltas and not freq:
        return 0.0
    return math.fsum(gamma_deltas) + coefficient * freq


# -- actions ---------------------------------------------------------------

@dataclass(frozen=True)
class Action:
    kind: str
    k: int = 0
    edge: tuple[int, int] | None = None
    option: int | None = None
    phi: tuple[int, int] | None = None
    amount: float = 0.0
    tip: int | None = None


def UNDO(k: int) -> Action:
    return Action("UNDO", k=k)


def ABORT() -> Action:
    return Action("ABORT")


TERMINAL = {"UNDO", "NEW_EXPANSION", "ABORT"}


class ReconView(Protocol):
    """What the policy needs to see of a reconstruction run."""

    n: int
    mode: Any
    expansions: list[int]
    relaxed: bool
    delta: int

    def depth(self) -> int: ...
    def tips(self) -> tuple[int, int]: ...
    def find_attach(self, region: frozenset[int], max_back: int) -> tuple[int, int, tuple[int, int]] | None: ...
    def phi_for(self, x1: int) -> tuple[int, int] | None: ...
    def lookahead_removals(self, phi: tuple[int, int]) -> int: ...
    def generators(self) -> set[int]: ...


@dataclass
class Failure:
    kind: str
    region: frozenset[int] = frozenset()
    tip: int | None = None
    depth: int = 0
    cuts: frozenset[int] = frozenset()
    overlap: bool = False


# -- policy state ----------------------------------------------------------

class PolicyState:
    def __init__(self, config: PolicyConfig | None = None, seed: int = 0, n: int = 1):
        self.config = config or PolicyConfig()
        self.rng = random.Random(seed)
        self.n = n
        self.a_terms: list[float] = []
        self.f_terms: list[float] = []
        self.t_terms: list[float] = []
        self._gamma = RunningSum()
        self._t = RunningSum()
        self.delta_gamma = 0.0
        self.connect_budget = self.config.connect_budget * n
        self.cnode_cap = self.config.cnode_cap
        self.k = 1
        self.exhausted = False
        self.ring_false_streak = 0
        self.fires: Counter = Counter()
        self.last_region: frozenset[int] | None = None
        self.last_fail_depth: int | None = None
        self.attach_pending = False
        self.attached_once = False
        self.zero_streak = 0
        self.failure_cuts: list[frozenset[int]] = []
        self.forced = False

    # rates

    @property
    def gamma(self) -> float:
        return self._gamma.value

    @property
    def t(self) -> float:
        return self._t.value

    @property
    def ring(self) -> bool:
        if self.forced:
            return False
        return ring(self.gamma, self.t)

    def recompute(self) -> tuple[float, float]:
        gamma = math.fsum(negativity_term(a) for a in self.a_terms)
        return gamma, gamma + math.fsum(self.t_terms)

    def current_a(self) -> float:
        if self.exhausted:
            return self.config.exhaust_a
        a = control_sigmoid(self.delta_gamma) - 0.5
        return min(max(a, 0.0), self.config.exhaust_a)

    def _clamp_t(self, t_i: float) -> float:
        return min(max(t_i, self.config.t_min), self.config.t_max)

    def enter_state(self, a: float, t_i: float) -> float:
        f = negativity_term(a)
        t_i = self._clamp_t(t_i)
        self.a_terms.append(a)
        self.f_terms.append(f)
        self.t_terms.append(t_i)
        self._gamma.add(f)
        self._t.add(f)
        self._t.add(t_i)
        return f

    def consistent(self, progress: bool = True) -> None:
        """Enter a state that passed its checks; only new ground earns tolerance."""
        a = self.current_a()
        self.enter_state(a, self.config.consistent_bonus if progress else 0.0)
        if self.attach_pending:
            self.delta_gamma *= self.config.delta_decay
            self.attach_pending = False
            self.attached_once = True
        self.ring_false_streak = 0 if self.ring else self.ring_false_streak + 1

    def fail(self, region: frozenset[int]) -> float:
        if region and region == self.last_region:
            self.delta_gamma += self.config.delta_step
        self.last_region = region
        a = self.current_a()
        f = negativity_term(a)
        self.enter_state(a, -self.config.failure_scale * f)
        return f

    def increase_rate(self, amount: float) -> None:
        self.delta_gamma += amount

    def reset_expansion(self) -> None:
        self.k = 1
        self.last_fail_depth = None
        self.zero_streak = 0
        self.connect_budget = self.config.connect_budget * self.n
        self.failure_cuts = []


# -- strategies ------------------------------------------------------------

@dataclass
class Ctx:
    ps: PolicyState
    rspn: Rspn
    rs: ReconView
    failure: Failure
    dgamma: float = 0.0


def _undo_depth(ctx: Ctx) -> int:
    ps, depth = ctx.ps, ctx.rs.depth()
    if depth <= 0:
        return 0
    if ctx.failure.depth == ps.last_fail_depth:
        ps.k = min(ps.k * 2, depth)
    else:
        ps.k = 1
    ps.last_fail_depth = ctx.failure.depth
    k = ps.k
    if ctx.ps.config.on(9):
        ctx.ps.fires[9] += 1
        k *= max(1, math.ceil(ctx.dgamma / 0.5))
    return max(1, min(k, depth))


def _attach_actions(ctx: Ctx, region: frozenset[int], sid: int) -> list[Action]:
    rs = ctx.rs
    hit = rs.find_attach(region, rs.depth())
    if hit is None:
        return []
    k, option, edge = hit
    ctx.ps.attach_pending = True
    if ctx.ps.config.on(14):
        ctx.rspn.nodeC.clear()
        ctx.ps.fires[14] += 1
    return [UNDO(k), Action("ADD_SYNC_EDGE", edge=edge, option=option)]


def _s8(ctx: Ctx) -> list[Action]:
    if not ctx.ps.ring or not ctx.rspn.nodeC or ctx.rs.depth() == 0:
        return []
    key = ctx.rspn.nodeC[0]
    region = frozenset(int(x) for x in key.split(",") if x)
    return _attach_actions(ctx, region, 8)


def _s18(ctx: Ctx) -> list[Action]:
    if not ctx.ps.ring or ctx.rs.depth() == 0:
        return []
    frequent = [key for key, rec in ctx.rspn.nodeA.items() if rec.count >= 2]
    if not frequent:
        return []
    key = max(frequent, key=lambda k: (ctx.rspn.nodeA[k].count, k))
    region = frozenset(int(x) for x in key.split(",") if x)
    return _attach_actions(ctx, region, 18)


def _overlap(ctx: Ctx) -> list[Action]:
    f = ctx.failure
    if not ctx.ps.ring or not f.overlap or ctx.rs.depth() == 0:
        return []
    k = _undo_depth(ctx)
    other = [t for t in ctx.rs.tips() if t != f.tip]
    if not other:
        return []
    return [UNDO(k), Action("PATH_SWAP"), Action("PIN_TIP", tip=other[0])]


def _s19(ctx: Ctx) -> list[Action]:
    if not ctx.ps.ring or ctx.rs.depth() == 0:
        return []
    gens = ctx.rs.generators()
    if not gens:
        return []
    ctx.ps.increase_rate(ctx.ps.config.delta_step)
    return _attach_actions(ctx, frozenset(gens), 19)


def _expansion(ctx: Ctx, x1: int) -> list[Action]:
    phi = ctx.rs.phi_for(x1)
    if phi is None:
        return []
    return [Action("NEW_EXPANSION", phi=phi)]


def _s20(ctx: Ctx) -> list[Action]:
    # temporary expansion seeded at the vertex that keeps failing
    if ctx.ps.ring or ctx.ps.exhausted:
        return []
    counts: Counter = Counter()
    for key, rec in ctx.rspn.nodeA.items():
        for x in key.split(","):
            if x:
                counts[int(x)] += rec.count
    for w, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        if w not in ctx.rs.expansions:
            acts = _expansion(ctx, w)
            if acts:
                ctx.rspn.nodeN.setdefault(str(w), [])
                return acts
    return []


def _s4(ctx: Ctx) -> list[Action]:
    if ctx.ps.ring or ctx.ps.exhausted:
        return []
    x1, x2 = ctx.rs.phi_tips()
    if x2 in ctx.rs.expansions:
        return []
    acts = _expansion(ctx, x2)
    return [Action("PATH_SWAP")] + acts if acts else []


def _pick_from(ctx: Ctx, members) -> list[Action]:
    for w in sorted(members):
        if w not in ctx.rs.expansions:
            acts = _expansion(ctx, w)
            if acts:
                return acts
    return []


def _s2(ctx: Ctx) -> list[Action]:
    if ctx.ps.ring or ctx.ps.exhausted:
        return []
    taken = set()
    for entry in ctx.rspn.nodeJ:
        taken |= entry.members
    best = None
    for cuts in ctx.ps.failure_cuts:
        fresh = cuts - taken
        pool = [w for w in sorted(fresh) if w not in ctx.rs.expansions]
        for w in pool:
            phi = ctx.rs.phi_for(w)
            if phi is None:
                continue
            score = ctx.rs.lookahead_removals(phi)
            if best is None or (score, w) < best[0]:
                best = ((score, w), cuts, phi)
    if best is None:
        return []
    ctx.rspn.add_j(best[1])
    return [Action("NEW_EXPANSION", phi=best[2])]


def _s1(ctx: Ctx) -> list[Action]:
    if ctx.ps.ring and not ctx.ps.exhausted:
        return []
    return _s1_forced(ctx)


def _articulation_expansion(ctx: Ctx) -> list[Action]:
    rs = ctx.rs
    if len(rs.expansions) >= max(rs.n - 1, 0):
        return []
    entry = ctx.rspn.add_j(ctx.failure.cuts)
    acts = [a for a in _pick_from(ctx, entry.members) if _fresh(ctx, a)]
    if acts or not ctx.ps.config.pool_fallback:
        return acts
    # articulation pool used up: seed at the failing tip, then anywhere
    taken = set()
    for e in ctx.rspn.nodeJ:
        taken |= e.members
    pool = ([ctx.failure.tip] if ctx.failure.tip is not None else []) + list(range(rs.n))
    for strict in (True, False):
        for w in pool:
            if w in rs.expansions or (strict and w in taken):
                continue
            acts = [a for a in _expansion(ctx, w) if _fresh(ctx, a)]
            if acts:
                if strict:
                    ctx.rspn.add_j({w})
                return acts
    return []


def _exhaust(ctx: Ctx) -> list[Action]:
    # unbounded growth: states now enter with a close to 1 until the ring
    # has stayed broken long enough
    ps = ctx.ps
    ps.exhausted = True
    a = ps.config.exhaust_a
    acts = []
    streak = 0
    while streak < ps.config.abort_after and len(acts) < 10 * ps.config.abort_after:
        ps.enter_state(a, -ps.config.failure_scale * negativity_term(a))
        streak = streak + 1 if not ring(ps.gamma, ps.t) else 0
        acts.append(Action("INCREASE_RATE", amount=a))
    ps.ring_false_streak = streak
    return acts + [ABORT()]


def _s_generic_undo(ctx: Ctx) -> list[Action]:
    # fallback of the attach strategy: step back to the former choice point
    if not ctx.ps.ring or ctx.rs.depth() == 0:
        return []
    k = _undo_depth(ctx)
    return [Action("INCREASE_RATE", amount=0.0), UNDO(k)]


def _modifier(ctx: Ctx) -> list[Action]:
    return []


def _s6(ctx: Ctx) -> list[Action]:
    ps = ctx.ps
    if ps.zero_streak >= 2:
        bump = ps.config.delta_step if ctx.rspn.nodeC else ps.config.drastic_step
        ps.increase_rate(bump)
        return [Action("INCREASE_RATE", amount=bump)]
    return []


def _s7(ctx: Ctx) -> list[Action]:
    ps = ctx.ps
    if ps.connect_budget <= 0:
        ps.increase_rate(ps.config.delta_step)
        return [Action("INCREASE_RATE", amount=ps.config.delta_step)]
    return []


def _s10(ctx: Ctx) -> list[Action]:
    key = component_key(ctx.failure.region)
    cost = attach_cost(ctx.rspn, key, coefficient=ctx.ps.config.freq_coefficient)
    if cost > ctx.ps.config.cost_threshold:
        ctx.ps.increase_rate(ctx.ps.config.delta_step)
        return [Action("INCREASE_RATE", amount=ctx.ps.config.delta_step)]
    return []


def _s12(ctx: Ctx) -> list[Action]:
    if ctx.ps.attach_pending and ctx.failure.kind == "constraint":
        ctx.ps.attach_pending = False
        ctx.ps.increase_rate(ctx.ps.config.drastic_step)
        key = component_key(ctx.failure.region)
        if key in ctx.rspn.nodeC:
            ctx.rspn.nodeC.remove(key)
        ctx.rspn.nodeC.appendleft(key)
        return [Action("INCREASE_RATE", amount=ctx.ps.config.drastic_step)]
    return []


def _s13(ctx: Ctx) -> list[Action]:
    ps = ctx.ps
    ps.cnode_cap = max(1, ps.config.cnode_cap - int(ps.delta_gamma / ps.config.delta_step))
    while len(ctx.rspn.nodeC) > ps.cnode_cap:
        ctx.rspn.nodeC.popleft()
    return []


def _s21(ctx: Ctx) -> list[Action]:
    return []


def _s22(ctx: Ctx) -> list[Action]:
    rs = ctx.rs
    if ctx.ps.ring or getattr(rs, "relaxed", True):
        return []
    rs.relaxed = True
    return []


DISPATCH = {
    1: _s1, 2: _s2, 3: _modifier, 4: _s4, 5: _modifier, 6: _s6, 7: _s7,
    8: _s8, 9: _modifier, 10: _s10, 11: _modifier, 12: _s12, 13: _s13,
    14: _modifier, 15: _overlap, 16: _overlap, 17: _overlap, 18: _s18,
    19: _s19, 20: _s20, 21: _s21, 22: _s22,
}

MODIFIERS = (6, 7, 10, 12, 13, 22)


def strategy_dispatch(sid: int, ctx: Ctx) -> list[Action]:
    if not ctx.ps.config.on(sid):
        return []
    acts = DISPATCH[sid](ctx)
    if sid == 3:
        return []
    acts = [a for a in acts if a.kind != "NEW_EXPANSION" or _fresh(ctx, a)]
    if acts:
        ctx.ps.fires[sid] += 1
    return acts


def _fresh(ctx: Ctx, act: Action) -> bool:
    ok = act.phi is not None and act.phi[0] not in ctx.rs.expansions
    if ok and ctx.ps.config.on(3):
        ctx.ps.fires[3] += 1
    return ok and len(ctx.rs.expansions) < max(ctx.rs.n - 1, 0)


def run_policy(ps: PolicyState, rspn: Rspn, rs: ReconView, failure: Failure,
               force_expansion: bool = False) -> list[Action]:
    """One pass of the tolerance policy after a failed state.

    With force_expansion the local repairs are skipped, as if the ring had
    already broken (used when an expansion runs out of its step budget).
    """
    if failure.kind == "exhausted" and rs.depth() > 0 and not force_expansion:
        return [UNDO(1)]
    dgamma = 0.0
    if failure.kind != "exhausted":
        dgamma = ps.fail(failure.region)
        key = component_key(failure.region)
        if failure.kind == "constraint" and (ps.attached_once or not ps.config.on(11) or not rspn.nodeC):
            rspn.note_inconsistency(key, ps.cnode_cap)
        rspn.note_attach(key, dgamma)
        if failure.cuts:
            ps.failure_cuts.append(failure.cuts)
    ctx = Ctx(ps, rspn, rs, failure, dgamma)
    ps.forced = force_expansion
    try:
        return _dispatch_all(ctx)
    finally:
        ps.forced = False


def _dispatch_all(ctx: Ctx) -> list[Action]:
    ps, rs = ctx.ps, ctx.rs
    actions: list[Action] = []
    for sid in MODIFIERS:
        actions.extend(strategy_dispatch(sid, ctx))
    if len(rs.expansions) >= max(rs.n - 1, 0) and not ps.ring:
        ps.exhausted = True
    for sid in ps.config.order:
        if sid in OVERLAP_FAMILY and sid != _overlap_pick(ps):
            continue
        acts = strategy_dispatch(sid, ctx)
        actions.extend(acts)
        if any(a.kind in TERMINAL for a in acts):
            return actions
    acts = _s_generic_undo(ctx)
    if acts:
        ps.fires[8] += 1
        return actions + acts
    # nothing local left to try
    ps.fires[1] += 1
    return actions + _s1_forced(ctx)


def _overlap_pick(ps: PolicyState) -> int | None:
    for sid in OVERLAP_FAMILY:
        if ps.config.on(sid):
            return sid
    return None


def _s1_forced(ctx: Ctx) -> list[Action]:
    if not ctx.ps.exhausted:
        acts = _articulation_expansion(ctx)
        if acts:
            return acts
    return _exhaust(ctx)
