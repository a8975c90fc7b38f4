import math

import numpy as np
import pytest

from lozenge_lab.errors import GeometryError
from lozenge_lab.trees.ust import forward_loop_erase
from lozenge_lab.trees.winding import (
    as_complex,
    is_simple,
    winding_intrinsic,
    winding_topological,
)
from lozenge_lab.utils.rng import derive_rng

SQUARE = [(1, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)]
STEPS = [(1, 0), (0, 1), (-1, 0), (0, -1)]


def _simple_lattice_path(rng, steps=60):
    moves = rng.integers(4, size=steps)
    walk = [(0, 0)]
    for m in moves:
        dx, dy = STEPS[int(m)]
        walk.append((walk[-1][0] + dx, walk[-1][1] + dy))
    return forward_loop_erase(walk)


def test_closed_loop_winds_once():
    assert winding_topological(SQUARE, 0j) == pytest.approx(2 * math.pi)
    assert winding_topological(SQUARE[::-1], (0.0, 0.0)) == pytest.approx(-2 * math.pi)
    assert winding_topological(SQUARE, (5.0, 5.0)) == pytest.approx(0.0)


def test_winding_is_additive():
    p = [(2, 0), (0, 2), (-2, 0)]
    q = [(-2, 0), (0, -2), (2, 0.5)]
    z = (0.1, 0.2)
    joined = p + q[1:]
    assert winding_topological(joined, z) == pytest.approx(
        winding_topological(p, z) + winding_topological(q, z), abs=1e-12
    )


def test_endpoint_windings():
    line = [(0, 0), (1, 0), (2, 0)]
    assert winding_topological(line, (0, 0)) == 0.0
    assert winding_topological(line, (2, 0)) == 0.0
    corner = [(0, 0), (1, 0), (1, 1)]
    assert winding_topological(corner, (0, 0)) == pytest.approx(math.pi / 4)
    assert winding_topological(corner, (1, 1)) == pytest.approx(math.pi / 4)


def test_point_on_curve_rejected():
    with pytest.raises(GeometryError):
        winding_topological([(0, 0), (2, 0), (2, 2)], (1, 0))


def test_intrinsic_winding_counts_turns():
    assert winding_intrinsic([(0, 0), (1, 0), (1, 1)]) == pytest.approx(math.pi / 2)
    assert winding_intrinsic([(0, 0), (1, 0), (1, -1), (2, -1)]) == pytest.approx(0.0)
    assert winding_intrinsic([(0, 0), (1, 0)]) == 0.0
    spiral = [(0, 0), (2, 0), (2, 2), (-1, 2), (-1, -1), (3, -1)]
    assert winding_intrinsic(spiral) == pytest.approx(2 * math.pi)


def test_intrinsic_winding_preconditions():
    with pytest.raises(GeometryError):
        winding_intrinsic([(0, 0), (0, 0), (1, 0)])
    with pytest.raises(GeometryError):
        winding_intrinsic([(0, 0), (2, 0), (2, 1), (1, -1)])
    with pytest.raises(GeometryError):
        winding_intrinsic([(0, 0), (1, 0), (0.5, 0)])


def test_is_simple():
    assert is_simple([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert not is_simple([(0, 0), (2, 0), (2, 1), (1, -1)])
    assert not is_simple(SQUARE)
    assert is_simple([(0, 0)])


def test_intrinsic_equals_endpoint_windings_on_lattice_paths():
    rng = derive_rng(2024)
    checked = 0
    for _ in range(2000):
        path = _simple_lattice_path(rng)
        if len(path) < 3:
            continue
        intrinsic = winding_intrinsic(path)
        endpoints = winding_topological(path, path[-1]) + winding_topological(path, path[0])
        assert intrinsic == pytest.approx(endpoints, abs=1e-9)
        checked += 1
    assert checked > 1000


@pytest.mark.slow
def test_intrinsic_identity_at_full_sample_size():
    rng = derive_rng(2025)
    for _ in range(10_000):
        path = _simple_lattice_path(rng, steps=200)
        if len(path) >= 3:
            assert winding_intrinsic(path) == pytest.approx(
                winding_topological(path, path[-1]) + winding_topological(path, path[0]), abs=1e-9
            )


def test_as_complex_accepts_mixed_input():
    values = as_complex([1 + 2j, (3, 4), np.float64(5.0)])
    assert values.tolist() == [1 + 2j, 3 + 4j, 5 + 0j]
