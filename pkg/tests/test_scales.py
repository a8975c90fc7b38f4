import math

import numpy as np
import pytest

from lozenge_lab.errors import GeometryError, TraceError
from lozenge_lab.trees.graph import disk_grid, square_box
from lozenge_lab.trees.scales import (
    classify_scales,
    clopper_pearson,
    crossing_decomposition,
    densify,
    following_scales,
    follows,
    frechet_distance,
    gamma_curves,
    isolated_scales,
    normalised_piece,
    scale_bounds,
    separates_origin,
    trace_rows,
    uniform_crossing_estimate,
)
from lozenge_lab.trees.ust import random_walk

# Loops once around the origin, then runs straight out along the real axis.
LASSO = [
    (0.5, 0.0), (0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5), (0.5, 0.0),
    (1.0, 0.0), (2.7183, 0.0), (5.0, 0.0), (8.0, 0.0), (9.0, 0.0),
]


def test_outward_walk_crosses_each_circle_once():
    walk = [(x, 0.0) for x in np.linspace(0.005, 2.995, 300)]
    tr = crossing_decomposition(walk, -2, 2)
    assert tr.times == (0, 14, 37, 100, 272, 299)
    assert tr.indices == (-3, -2, -1, 0, 1, 2)
    assert tr.k_max == 5
    assert [tr.kappa(i) for i in range(-2, 2)] == [1, 2, 3, 4]
    assert tr.kappa(7) is None
    classes = isolated_scales(tr)
    assert classes.pre_isolated == {-2, -1, 0, 1}
    assert classes.even == {-2, 0}
    assert classes.isolated == frozenset()


def test_lattice_walk_trace_moves_one_circle_at_a_time(rng):
    delta = 2 ** -5
    g = disk_grid(delta)
    i_min, i_max = scale_bounds(delta, 1.0)
    walk = random_walk(g, g.nearest_vertex((0.0, 0.0)), rng)
    tr = crossing_decomposition(walk, i_min, i_max, position=g.position)
    assert tr.indices[0] == i_min - 1 and tr.indices[-1] == i_max
    assert all(abs(b - a) == 1 for a, b in zip(tr.indices, tr.indices[1:]))
    assert list(tr.times) == sorted(tr.times)
    assert len(set(tr.times[:-1])) == tr.k_max
    rows = trace_rows(tr)
    assert len(rows) == tr.k_max + 1
    assert rows[0] == {"k": 0, "tau": 0, "i": i_min - 1, "radius": 0.0}


@pytest.mark.parametrize("delta, radius, expected", [
    (2 ** -4, 1.0, (0, 1)),
    (2 ** -7, 1.0, (-2, 1)),
    (2 ** -7, math.e ** 2, (-2, 3)),
])
def test_scale_bounds(delta, radius, expected):
    assert scale_bounds(delta, radius) == expected


def test_scale_bounds_rejects_coarse_mesh():
    with pytest.raises(TraceError):
        scale_bounds(0.5, 1.0)
    with pytest.raises(TraceError):
        scale_bounds(0.0, 1.0)


@pytest.mark.parametrize("walk, i_min, i_max", [
    ([(0.0, 0.0), (3.0, 0.0)], 1, 1),
    ([], -1, 1),
    ([(2.0, 0.0), (3.0, 0.0)], -1, 1),
    ([(0.0, 0.0), (0.5, 0.0)], -1, 1),
])
def test_crossing_decomposition_preconditions(walk, i_min, i_max):
    with pytest.raises(TraceError):
        crossing_decomposition(walk, i_min, i_max)


def test_separates_origin():
    square = [(1, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)]
    assert separates_origin(square)
    assert not separates_origin([(x + 5, y + 5) for x, y in square])
    assert not separates_origin([(1, 0), (2, 0), (2, 1), (3, 1)])
    assert separates_origin(LASSO)


def test_lasso_scale_is_isolated_and_following():
    tr = crossing_decomposition(LASSO, 0, 3)
    assert tr.times == (0, 6, 7, 9, 10)
    classes = following_scales(tr)
    assert classes.pre_isolated == {0, 1, 2}
    assert classes.isolated == {0}
    assert classes.following == {0}
    piece, theta = normalised_piece(tr, 0)
    assert theta == 0.0
    assert piece[0] == 1.0


def test_classification_json():
    data = classify_scales(crossing_decomposition(LASSO, 0, 3)).to_json()
    assert data == {"pre_isolated": [0, 1, 2], "even": [0, 2], "isolated": [], "following": []}


@pytest.mark.parametrize("theta", [0.0, 0.5, math.pi / 2, math.pi])
def test_reference_curves_wind_once_apart(theta):
    curves = gamma_curves(1, theta)
    target = np.exp(2 + 1j * theta)
    assert curves.first[0] == pytest.approx(math.e)
    assert curves.first[-1] == pytest.approx(target)
    assert curves.second[-1] == pytest.approx(target)
    assert curves.winding_gap == pytest.approx(-2 * math.pi, abs=1e-6)


def test_reference_curves_reject_theta():
    with pytest.raises(GeometryError):
        gamma_curves(0, -0.1)
    with pytest.raises(GeometryError):
        gamma_curves(0, 4.0)


def test_frechet_distance():
    line = [0, 1, 2]
    assert frechet_distance(line, line) == 0.0
    assert frechet_distance(line, [z + 0.5j for z in line]) == pytest.approx(0.5)
    assert frechet_distance([0, 2], [0, 1, 2]) == pytest.approx(1.0)
    with pytest.raises(GeometryError):
        frechet_distance([], line)


def test_densify():
    assert densify([0, 1], 0.25).tolist() == [0, 0.25, 0.5, 0.75, 1.0]
    assert len(densify([0, 1], 0.0)) == 2


def test_follows():
    curve = gamma_curves(0, 0.5).first
    assert follows(curve + 0.01, curve, 0)
    assert not follows(curve + 0.5, curve, 0)


def test_clopper_pearson():
    low, high = clopper_pearson(5, 10)
    assert 0.0 < low < 0.5 < high < 1.0
    assert clopper_pearson(0, 10)[0] == 0.0
    assert clopper_pearson(10, 10)[1] == 1.0
    with pytest.raises(ValueError):
        clopper_pearson(0, 0)


def test_uniform_crossing_estimate(rng):
    est = uniform_crossing_estimate(square_box(12, 12), 3, 20, rng, anchor=(0.5, 0.5))
    assert len(est.cells) == 36
    assert est.alpha == min(c.rate for c in est.cells)
    assert est.low <= est.alpha <= est.high
    data = est.to_json()
    assert data["confidence"] == 0.99 and len(data["cells"]) == 36


def test_uniform_crossing_estimate_geometry(rng):
    box = square_box(12, 12)
    with pytest.raises(GeometryError):
        uniform_crossing_estimate(box, 100, 5, rng)
    with pytest.raises(GeometryError):
        uniform_crossing_estimate(box, 1, 5, rng, anchor=(0.5, 0.5))
    with pytest.raises(GeometryError):
        uniform_crossing_estimate(box, 3, 0, rng)
