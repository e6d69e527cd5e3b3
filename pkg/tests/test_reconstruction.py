import random

from hamseq.generators import named, planted_cycle
from hamseq.graph import Graph
from hamseq.mapping import map_attempt
from hamseq.oracle import Mode, adjacency_walk
from hamseq.policy import PolicyState, Rspn
from hamseq.reconstruction import ReconError, ReconState, reconstruct
from hamseq.records import EdgeRecord as E

from conftest import complete_graph, cycle_graph, path_graph


def test_dstar_counts():
    rs = ReconState(path_graph(3), [E(0, 1), E(1, 2)])
    assert [rs.dstar(v) for v in range(3)] == [1, 2, 1]
    rs.live.discard(1)
    assert rs.dstar(0) == 0
    rs = ReconState(Graph(4, [(2, 3)]), [E(3, 3, kind="marker"), E(3, 3, kind="marker")])
    assert rs.dstar(3) == 2


def test_exactness():
    rs = ReconState(path_graph(3), [E(0, 1), E(1, 2)])
    assert rs.exactness() == 1.0
    rs = ReconState(path_graph(11), [E(i, i + 1) for i in range(10)])
    rs.removals = [(0, True), (3, True), (4, False)]
    assert rs.exactness() == 0.8


def test_walk_follows_overlay():
    g = cycle_graph(4)
    rs = ReconState(g, [E(0, 1), E(1, 2)], Mode.PATH, relaxed=True)
    rs.start((3, 0))
    rs.active = 1  # tip 0
    end = rs.walk_pv(1)
    assert end == 2
    assert rs.paths[1] == [0, 1, 2]
    assert all(r.sync for r in rs.le if r.pair in ((0, 1), (1, 2)))
    assert 0 not in rs.live and 1 not in rs.live


def test_walk_stays_at_endpoint():
    rs = ReconState(path_graph(3), [E(0, 1)], Mode.PATH, relaxed=True)
    rs.start((0, 1))
    assert rs.walk_pv(1) == 1


def test_unmapped_neighbour_gets_doubled_marker():
    g = complete_graph(3)
    rs = ReconState(g, [E(0, 1)])
    rs.start((0, 1))
    s0, s1, s2 = rs.candidate_partition(1)
    assert [r.pair for r in s0] == [(2, 2), (2, 2)]
    assert rs.dstar(2) == 2
    assert s1 == []


def test_partition_of_isolated_tip_is_empty():
    rs = ReconState(Graph(3, [(0, 1), (1, 2)]), [E(0, 1), E(1, 2)], Mode.PATH, relaxed=True)
    rs.start((1, 2))
    rs.live -= {0}
    rs.paths[0] = [0, 1]
    assert rs.candidate_partition(2) == ([], [], [])


def test_tip_to_tip_record_removed_early():
    rs = ReconState(cycle_graph(5), [E(0, 2), E(2, 3)], Mode.CIRCUIT)
    rs.paths = [[0], [2]]
    rs.apply_removal_cases()
    assert all({r.a, r.b} != {0, 2} for r in rs.le)
    assert rs.removals[0] == (0, True)
    assert rs.exactness() == 0.5


def test_triangle_reconstructs():
    g = complete_graph(3)
    rs = ReconState(g, [E(0, 1), E(1, 2)])
    rs.start((0, 1))
    assert rs.step() == "done"
    seq = rs.sequence()
    assert sorted(seq) == [0, 1, 2]
    assert adjacency_walk(g, seq, Mode.CIRCUIT)


def test_star_path_aborts():
    g = named("star4")
    res = map_attempt(g, 0)
    rs = ReconState(g, res.le, Mode.PATH)
    out = reconstruct(rs, PolicyState(n=4), Rspn(), v0=0)
    assert out.status == "aborted"
    assert out.sequence is None


def test_single_vertex():
    rs = ReconState(Graph(1), [])
    out = reconstruct(rs, PolicyState(n=1), Rspn(), v0=0)
    assert out.status == "done" and out.sequence == [0]


def test_failed_step_leaves_state_untouched():
    g = named("petersen")
    res = map_attempt(g, 0, seed=2)
    rs = ReconState(g, res.le, Mode.CIRCUIT)
    rs.start(rs.initial_phi(0))
    for _ in range(40):
        before = rs.digest()
        frames = len(rs.frames)
        try:
            rs.step(option=3)
        except ReconError:
            assert rs.digest() == before
            assert len(rs.frames) == frames
            break
    else:
        raise AssertionError("expected at least one rejected step")


def test_undo_restores_digests():
    rng = random.Random(11)
    for seed in range(20):
        g = planted_cycle(14, 0.2, seed)
        res = map_attempt(g, 0, seed=seed)
        rs = ReconState(g, res.le, Mode.CIRCUIT)
        rs.start(rs.initial_phi(0))
        history = [rs.digest()]
        for _ in range(30):
            if rs.frames and rng.random() < 0.3:
                k = rng.randint(1, len(rs.frames))
                rs.undo_states(k)
                del history[-k:]
                assert rs.digest() == history[-1]
                continue
            try:
                result = rs.step(option=rng.randint(0, 2))
            except ReconError:
                assert rs.digest() == history[-1]
                continue
            history.append(rs.digest())
            if result == "done":
                break


def test_found_sequences_are_hamiltonian():
    for seed in range(15):
        g = planted_cycle(12, 0.2, seed)
        res = map_attempt(g, 0, seed=seed)
        rs = ReconState(g, res.le, Mode.CIRCUIT)
        out = reconstruct(rs, PolicyState(seed=seed, n=g.n), Rspn(), v0=0)
        assert 0.0 <= out.mu_x <= 1.0
        assert len(out.expansions) <= g.n - 1
        assert len(set(out.expansions)) == len(out.expansions)
        if out.status == "done":
            assert adjacency_walk(g, out.sequence, Mode.CIRCUIT)
