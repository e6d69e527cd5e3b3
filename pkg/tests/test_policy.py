import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamseq.policy import (
    Failure,
    PolicyConfig,
    PolicyState,
    Rspn,
    RunningSum,
    attach_cost,
    control_sigmoid,
    negativity_term,
    ring,
    run_policy,
)

INV_SQRT_2PI = 1 / math.sqrt(2 * math.pi)


class FakeRecon:
    """Just enough of the reconstruction state for the policy to act on."""

    def __init__(self, n=8, depth=3, expansions=(0,), attach=None, relaxed=True):
        self.n = n
        self._depth = depth
        self.expansions = list(expansions)
        self.attach = attach
        self.relaxed = relaxed
        self.phi = (0, 1)

    def depth(self):
        return self._depth

    def tips(self):
        return (0, 1)

    def phi_tips(self):
        return self.phi

    def find_attach(self, region, max_back):
        return self.attach

    def phi_for(self, x1):
        return (x1, (x1 + 1) % self.n)

    def lookahead_removals(self, phi):
        return phi[0] % 3

    def generators(self):
        return set()


def test_rate_formulas():
    assert abs(negativity_term(0) - 0.3989422804014327) < 1e-12
    assert abs(negativity_term(0.5) - 2 * 0.3989422804014327) < 1e-12
    assert control_sigmoid(0) == 0.5
    assert abs(control_sigmoid(1) - 0.7310585786300049) < 1e-12
    assert control_sigmoid(50) == pytest.approx(1.0)
    assert ring(0, 1) is True
    assert ring(1.5, 1.5) is False
    assert ring(2, 1) is False
    assert ring(1.0, 1.5) is True


@given(st.floats(0, 0.999), st.floats(0, 0.999))
def test_negativity_term_monotone(a, b):
    if a < b:
        assert negativity_term(a) <= negativity_term(b)
    assert negativity_term(a) >= INV_SQRT_2PI - 1e-15


def test_attach_cost_examples():
    rspn = Rspn()
    assert attach_cost(rspn, "1,2") == 0
    assert attach_cost(rspn, "1,2", [0.2, 0.3], 2) == pytest.approx(0.7, abs=1e-12)
    rspn.note_attach("1,2", 0.4)
    first = attach_cost(rspn, "1,2")
    rspn.note_attach("1,2", 0.4)
    assert attach_cost(rspn, "1,2") > first


def test_running_sum_matches_fsum():
    vals = [0.1] * 10 + [1e16, 1.0, -1e16]
    acc = RunningSum()
    for v in vals:
        acc.add(v)
    assert acc.value == math.fsum(vals)


def test_accumulators_match_recomputation():
    ps = PolicyState(seed=3, n=10)
    region = frozenset({1, 2})
    for i in range(200):
        if i % 7 == 3:
            ps.fail(region)
        elif i % 11 == 5:
            ps.increase_rate(0.25)
            ps.consistent(progress=False)
        else:
            ps.consistent(progress=True)
    gamma, t = ps.recompute()
    assert abs(gamma - ps.gamma) < 1e-12
    assert abs(t - ps.t) < 1e-12
    assert ps.ring == ring(ps.gamma, ps.t)


def test_failures_push_ring_towards_breaking():
    ps = PolicyState(n=10)
    ps.consistent()
    assert ps.ring
    for _ in range(5):
        ps.fail(frozenset({4}))
    assert not ps.ring


def test_config_round_trip_and_rejects_unknown(tmp_path):
    cfg = PolicyConfig()
    cfg.enabled[19] = True
    cfg.delta_step = 0.5
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    back = PolicyConfig.load(str(path))
    assert back.to_dict() == cfg.to_dict()
    with pytest.raises(ValueError):
        PolicyConfig.from_dict({"nope": 1})


def broken_state(n=8):
    ps = PolicyState(n=n)
    for _ in range(6):
        ps.fail(frozenset({7}))
    assert not ps.ring
    return ps


def test_broken_ring_starts_expansion_at_articulation():
    ps = broken_state()
    rspn = Rspn()
    fake = FakeRecon()
    acts = run_policy(ps, rspn, fake, Failure("constraint", frozenset({5}), 0, 3, frozenset({3, 4})))
    kinds = [a.kind for a in acts]
    assert "NEW_EXPANSION" in kinds
    phi = next(a.phi for a in acts if a.kind == "NEW_EXPANSION")
    assert phi[0] not in fake.expansions
    assert any(phi[0] in e.members for e in rspn.nodeJ) or phi[0] == 1


def test_used_up_expansions_abort():
    ps = broken_state()
    fake = FakeRecon(n=4, expansions=(0, 1, 2))
    acts = run_policy(ps, Rspn(), fake, Failure("constraint", frozenset({3}), 0, 1, frozenset({3})))
    assert acts[-1].kind == "ABORT"
    assert not any(a.kind == "NEW_EXPANSION" for a in acts)
    gamma, t = ps.recompute()
    assert abs(gamma - ps.gamma) < 1e-12 and abs(t - ps.t) < 1e-12


def test_no_fallback_pool_aborts_when_articulations_used():
    cfg = PolicyConfig(pool_fallback=False)
    ps = PolicyState(cfg, n=8)
    for _ in range(6):
        ps.fail(frozenset({7}))
    fake = FakeRecon(expansions=(0, 3, 4))
    fake.phi = (0, 3)  # the swap target is used up as well
    acts = run_policy(ps, Rspn(), fake, Failure("constraint", frozenset({5}), 0, 1, frozenset({3, 4})))
    assert acts[-1].kind == "ABORT"


def healthy_state(n=8):
    ps = PolicyState(n=n)
    for _ in range(10):
        ps.consistent()
    return ps


def test_attachable_inconsistency_undoes_and_attaches():
    ps = healthy_state()
    rspn = Rspn()
    rspn.nodeC.append("5")
    fake = FakeRecon(attach=(2, 1, (4, 5)))
    acts = run_policy(ps, rspn, fake, Failure("constraint", frozenset({5}), 0, 3, frozenset()))
    kinds = [a.kind for a in acts]
    assert kinds[-2:] == ["UNDO", "ADD_SYNC_EDGE"]
    undo = acts[-2]
    assert undo.k == 2
    assert acts[-1].edge == (4, 5)


def test_repeated_failure_without_attachment_undoes():
    ps = healthy_state()
    fake = FakeRecon(depth=5)
    acts = run_policy(ps, Rspn(), fake, Failure("walk", frozenset({2}), 0, 4, frozenset()))
    assert acts[-1].kind == "UNDO"
    assert 1 <= acts[-1].k <= 5


def test_reused_x1_is_rejected():
    ps = broken_state()
    fake = FakeRecon(expansions=(0, 3))
    acts = run_policy(ps, Rspn(), fake, Failure("constraint", frozenset({5}), 0, 1, frozenset({3})))
    phis = [a.phi for a in acts if a.kind == "NEW_EXPANSION"]
    assert phis and all(p[0] not in (0, 3) for p in phis)
    assert ps.fires[3] >= 1


def test_connect_budget_exhaustion_raises_rate():
    ps = healthy_state()
    ps.connect_budget = 0
    before = ps.delta_gamma
    acts = run_policy(ps, Rspn(), FakeRecon(), Failure("walk", frozenset({2}), 0, 1, frozenset()))
    assert any(a.kind == "INCREASE_RATE" for a in acts)
    assert ps.delta_gamma > before


def test_relaxation_switches_on_when_ring_breaks():
    ps = broken_state()
    fake = FakeRecon(relaxed=False)
    run_policy(ps, Rspn(), fake, Failure("constraint", frozenset({5}), 0, 1, frozenset({3})))
    assert fake.relaxed


def test_frozen_j_entries_are_not_replaced():
    rspn = Rspn()
    e = rspn.add_j({4})
    assert e.frozen
    assert not rspn.replace_j(0, {5})
    rspn.add_j({1, 2})
    assert rspn.replace_j(1, {2})
    assert rspn.add_j(set()) is not None
    assert len(rspn.nodeJ) == 2


def only(*sids):
    cfg = PolicyConfig()
    cfg.enabled = {k: k in sids for k in cfg.enabled}
    return cfg


@pytest.mark.parametrize("healthy", [True, False])
def test_strategy_one_alone_expands_or_aborts(healthy):
    ps = PolicyState(only(1), n=8)
    for _ in range(10 if healthy else 0):
        ps.consistent()
    for _ in range(0 if healthy else 6):
        ps.fail(frozenset({7}))
    acts = run_policy(ps, Rspn(), FakeRecon(), Failure("constraint", frozenset({5}), 0, 2, frozenset({3})))
    assert acts[-1].kind in ("NEW_EXPANSION", "ABORT", "UNDO")
    if not healthy:
        assert acts[-1].kind in ("NEW_EXPANSION", "ABORT")


def test_attachment_clears_inconsistency_list():
    ps = healthy_state()
    rspn = Rspn()
    rspn.nodeC.extend(["5", "6"])
    run_policy(ps, rspn, FakeRecon(attach=(1, 1, (4, 5))), Failure("constraint", frozenset({5}), 0, 3, frozenset()))
    assert ps.fires[14] == 1
    assert not rspn.nodeC
