from fractions import Fraction

import pytest

from lozenge_lab.errors import GeometryError, MatchingError
from lozenge_lab.trees.graph import square_box, square_patch
from lozenge_lab.trees.temperley import (
    corner_heights,
    enumerate_matchings,
    height_from_winding,
    left_corner,
    temperley_dimers,
    temperley_graph,
    tree_from_dimers,
)
from lozenge_lab.trees.ust import _checked_tree, count_wired_trees, enumerate_wired_trees, wilson_ust
from lozenge_lab.utils.rng import derive_rng


def test_dimer_graph_of_two_by_two_patch(patch_2x2):
    tg = temperley_graph(patch_2x2)
    assert len(tg.whites) == len(tg.blacks) == 12
    assert all(len(tg.adjacency[w]) in (2, 3, 4) for w in tg.whites)
    assert len(tg.faces) == 9
    assert temperley_graph(patch_2x2) is tg


@pytest.mark.parametrize("k, l", [(1, 1), (1, 2), (2, 2), (2, 3)])
def test_tree_count_equals_matching_count(k, l):
    g = square_patch(k, l)
    assert len(enumerate_matchings(temperley_graph(g))) == round(count_wired_trees(g))


@pytest.mark.parametrize("k, l", [(1, 2), (2, 2), (2, 3)])
def test_round_trip_is_identity(k, l):
    g = square_patch(k, l)
    tg = temperley_graph(g)
    trees = enumerate_wired_trees(g)
    matchings = {temperley_dimers(t, tg) for t in trees}
    assert len(matchings) == len(trees)
    assert matchings == set(enumerate_matchings(tg))
    for t in trees:
        assert tree_from_dimers(temperley_dimers(t, tg), g).key() == t.key()


def test_matchings_are_perfect(patch_2x2, rng):
    tg = temperley_graph(patch_2x2)
    matching = temperley_dimers(wilson_ust(patch_2x2, rng=rng), tg)
    covered = [n for pair in matching for n in pair]
    assert len(covered) == len(set(covered)) == len(tg.adjacency)
    for white, black in matching:
        assert white[0] == "e"
        assert black in tg.adjacency[white]


def test_corner_heights_are_quarter_integers(rng):
    g = square_patch(6, 6)
    tg = temperley_graph(g)
    heights = corner_heights(temperley_dimers(wilson_ust(g, rng=rng), tg), tg)
    assert heights
    assert all((4 * h).denominator == 1 for h in heights.values())
    assert Fraction(0) in heights.values()


def test_corner_heights_need_bulk():
    tg = temperley_graph(square_patch(1, 1))
    matching = enumerate_matchings(tg)[0]
    with pytest.raises(GeometryError):
        corner_heights(matching, tg)


def test_root_is_a_corner_triangle(patch_2x2):
    tg = temperley_graph(patch_2x2)
    assert set(tg.faces[tg.root_face]) == {(0, 1), (1, 0), (1, 1)}
    assert tg.ring == ((1, 0), (2, 0), (3, 1), (3, 2), (2, 3), (1, 3), (0, 2), (0, 1))


def test_winding_matches_dimer_height():
    k = 5
    g = square_patch(k, k)
    tg = temperley_graph(g)
    rng = derive_rng(77)
    offsets = set()
    compared = through_ring = 0
    for _ in range(1000):
        t = wilson_ust(g, rng=rng)
        heights = corner_heights(temperley_dimers(t, tg), tg)
        vertices = [v for v in g.interior if left_corner(t, tg, v) in heights]
        order = [vertices[i] for i in rng.permutation(len(vertices))]
        for x, y in zip(order, order[1:]):
            cx, cy = left_corner(t, tg, x), left_corner(t, tg, y)
            by = set(t.branch(y))
            if not any(u in by for u in t.branch(x) if u not in g.boundary):
                through_ring += 1
            offsets.add(height_from_winding(t, x, y, tg) - (heights[cx] - heights[cy]))
            compared += 1
    assert compared > 10_000
    assert through_ring > 1000
    assert len(offsets) == 1


def test_ring_closure_on_a_comb():
    g = square_patch(3, 3)
    tg = temperley_graph(g)
    parent = {(i, j): (i, j - 1) for i in range(1, 4) for j in range(1, 4)}
    t = _checked_tree(g, parent)
    heights = corner_heights(temperley_dimers(t, tg), tg)
    x, y = (1, 3), (2, 3)
    assert height_from_winding(t, x, y, tg) == heights[left_corner(t, tg, x)] - heights[left_corner(t, tg, y)]
    assert height_from_winding(t, x, y) == 0


def test_height_from_winding_preconditions(patch_2x2, rng):
    t = wilson_ust(patch_2x2, rng=rng)
    ring_vertex = next(iter(patch_2x2.boundary))
    with pytest.raises(GeometryError):
        height_from_winding(t, (1, 1), ring_vertex)
    assert height_from_winding(t, (1, 1), (1, 1)) == 0


def test_temperley_rejects_foreign_tree(patch_2x2):
    t = enumerate_wired_trees(square_patch(1, 2))[0]
    with pytest.raises((KeyError, MatchingError, GeometryError)):
        temperley_dimers(t, temperley_graph(patch_2x2))


def test_boundary_edges_are_rejected():
    with pytest.raises(GeometryError):
        temperley_graph(square_box(2, 2))
