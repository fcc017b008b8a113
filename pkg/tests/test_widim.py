import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brodylab.errors import CoverError, SearchGuardError
from brodylab.widim import (
    GridBoxCover,
    GridCube,
    ShiftSystem,
    cover_order,
    dynamical_distance,
    mean_dim_normalize,
    min_order_box_cover,
    widim_growth_scan,
    write_cover_json,
)


def test_cover_order_examples():
    cube = GridCube(1, 2)
    assert cover_order(GridBoxCover(cube, (((0, 1),), ((1, 2),)))) == 1
    assert cover_order(GridBoxCover(cube, (((0, 2),),))) == 0
    with pytest.raises(CoverError, match="3/4"):
        cover_order(GridBoxCover(GridCube(1, 2), (((0, 1),),)))
    with pytest.raises(CoverError):
        GridBoxCover(cube, (((1, 1),),))


def test_boundary_points_counted():
    # the four unit squares of the 2x2 grid meet at the centre
    cube = GridCube(2, 2)
    cells = tuple(((i, i + 1), (j, j + 1)) for i in range(2) for j in range(2))
    assert cover_order(GridBoxCover(cube, cells)) == 3


@pytest.mark.parametrize(
    "N, m, eps, order",
    [
        (1, 2, 0.6, 1),
        (1, 3, 0.6, 1),
        (1, 4, 0.6, 1),
        (2, 4, 0.6, 2),
        (2, 3, 0.7, 2),
        (1, 2, 1.0, 0),
        (2, 3, 1.5, 0),
    ],
)
def test_min_order_values(N, m, eps, order):
    got, witness = min_order_box_cover(GridCube(N, m), eps)
    assert got == order
    assert cover_order(witness) == order
    assert witness.mesh <= eps + 1e-12


def test_unit_cells_only():
    # with eps * m < 2 every admissible box is a single cell, so the
    # cells around an interior grid vertex all overlap there
    for N, m in ((2, 2), (2, 3)):
        assert min_order_box_cover(GridCube(N, m), 0.6)[0] == 2**N - 1


def test_min_order_guards():
    with pytest.raises(CoverError):
        min_order_box_cover(GridCube(2, 2), 0.3)
    with pytest.raises(SearchGuardError):
        min_order_box_cover(GridCube(3, 4), 0.6, node_limit=1000)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 2), st.integers(2, 4), st.floats(0.3, 1.2), st.floats(0.3, 1.2))
def test_min_order_monotone_in_eps(N, m, e1, e2):
    lo, hi = sorted((e1, e2))
    if lo * m < 1:
        return
    assert min_order_box_cover(GridCube(N, m), hi)[0] <= min_order_box_cover(GridCube(N, m), lo)[0]


def test_write_cover_json(tmp_path):
    order, cover = min_order_box_cover(GridCube(1, 3), 0.7)
    write_cover_json(order, cover, tmp_path / "c.json")
    assert '"order": 1' in (tmp_path / "c.json").read_text()


def test_shift_system_constants():
    sys = ShiftSystem(2, 1)
    assert [sys.shell_size(j) for j in range(4)] == [1, 2, 2, 2]
    assert sys.tail_constant(5) == pytest.approx(4 * 2**-5)
    assert sys.projection_radius(0.25) == 5
    sys2 = ShiftSystem(1, 2)
    assert [sys2.shell_size(j) for j in range(4)] == [1, 4, 8, 12]


def test_growth_scan_rates():
    scan = widim_growth_scan(ShiftSystem(2, 1), 0.25, range(1, 401))
    row = scan.rows[-1]
    assert (row.L, row.U, row.s) == (800, 2 * 409, 5)
    assert (row.U_rate - row.L_rate) / row.L_rate < 0.05
    assert widim_growth_scan(ShiftSystem(1, 1), 1.5, [3]).rows[0].L == 0


def test_growth_scan_cross_check():
    scan = widim_growth_scan(ShiftSystem(1, 1), 0.6, [1, 2], cross_check_m=4)
    assert scan.cross_checks[0] == (1, 1, 1.0)
    assert scan.cross_checks[1] == (2, 2, 2.0)


def test_mean_dim_normalize():
    assert mean_dim_normalize(4.0, 2.0) == 2.0
    with pytest.raises(ValueError):
        mean_dim_normalize(1.0, 0)


_configs = st.integers(0, 10**6).map(lambda s: np.random.default_rng(s).uniform(0, 1, (6, 2)))


@settings(max_examples=30)
@given(_configs, _configs, _configs)
def test_dynamical_distance_properties(x, y, z):
    assert dynamical_distance(x, y, [0]) == pytest.approx(dynamical_distance(y, x, [0]))
    assert dynamical_distance(x, z, [0, 3]) <= dynamical_distance(x, y, [0, 3]) + dynamical_distance(y, z, [0, 3]) + 1e-12
    # enlarging the window can only increase the distance
    assert dynamical_distance(x, y, [2]) <= dynamical_distance(x, y, [2, 4]) + 1e-15
    # shifting both configurations and the window together changes nothing
    xs, ys = np.roll(np.pad(x, ((0, 3), (0, 0))), 2, axis=0), np.roll(np.pad(y, ((0, 3), (0, 0))), 2, axis=0)
    assert dynamical_distance(xs, ys, [3], origin=[0]) == pytest.approx(dynamical_distance(x, y, [1]), rel=1e-12)


def test_dynamical_distance_single_site():
    x = np.zeros((5, 2))
    y = np.zeros((5, 2))
    y[2] = [0.5, 0.25]
    assert dynamical_distance(x, y, [2]) == 0.5
    assert dynamical_distance(x, y, [0]) == 0.125
    assert dynamical_distance(x, y, [0], origin=[2]) == 0.5
    with pytest.raises(ValueError):
        dynamical_distance(x, y, [(0, 0)])
