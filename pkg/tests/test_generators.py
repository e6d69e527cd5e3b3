import pytest

from hamseq.errors import InvalidParams
from hamseq.generators import FAMILIES, generate, gnp_connected, grid, named, planted_cycle, planted_path
from hamseq.graph import is_connected
from hamseq.oracle import Mode, exact_solve


def test_planted_cycle_is_hamiltonian_and_seeded():
    g = planted_cycle(10, 0.2, 7)
    assert exact_solve(g, Mode.CIRCUIT) is not None
    assert g == planted_cycle(10, 0.2, 7)
    assert any(planted_cycle(10, 0.2, s) != g for s in range(8, 12))


def test_planted_path_has_path():
    for seed in range(5):
        assert exact_solve(planted_path(9, 0.1, seed), Mode.PATH) is not None


def test_gnp_connected():
    for seed in range(5):
        g = gnp_connected(12, 0.2, seed)
        assert is_connected(g, range(12))


def test_grid_and_named_shapes():
    g = grid(3, 3)
    assert (g.n, g.m) == (9, 12)
    p = named("petersen")
    assert (p.n, p.m) == (10, 15)
    assert all(p.degree(v) == 3 for v in range(10))


@pytest.mark.parametrize("family, params", [
    ("planted_cycle", {"n": 2}),
    ("planted_cycle", {"n": 5, "p": 1.5}),
    ("gnp_connected", {"n": 5}),
    ("grid", {"rows": 0, "cols": 3}),
    ("named", {"name": "nope"}),
    ("mystery", {}),
])
def test_bad_params(family, params):
    with pytest.raises(InvalidParams):
        generate(family, params)


def test_generate_dispatch_covers_families():
    params = {
        "planted_cycle": {"n": 6, "p": 0.1},
        "planted_path": {"n": 6, "p": 0.1},
        "gnp_connected": {"n": 6, "p": 0.5},
        "grid": {"rows": 2, "cols": 3},
        "named": {"name": "k4"},
    }
    for family in FAMILIES:
        assert generate(family, params[family], 1).n > 0
