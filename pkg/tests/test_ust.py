import math
from collections import Counter, defaultdict

import numpy as np
import pytest
from scipy import stats

from lozenge_lab.errors import CapExceededError, GeometryError
from lozenge_lab.trees.graph import (
    PlanarGraph,
    disk_grid,
    graph_from_json,
    path_points,
    square_box,
    square_patch,
)
from lozenge_lab.trees.ust import (
    backward_loop_erase,
    count_wired_trees,
    enumerate_wired_trees,
    forward_loop_erase,
    loop_erased_walk,
    mixed_loop_erase,
    random_walk,
    subtree_spanning,
    tree_from_json,
    tree_to_json,
    wilson_ust,
)
from lozenge_lab.utils.rng import derive_rng

LOOPY = [1, 2, 3, 2, 1, 3, 4]


def _absorbing_graph():
    """Four-cycle of interior vertices, each strongly tied to one boundary vertex."""
    positions = {0: (1.0, 0.0), 1: (0.0, 1.0), 2: (-1.0, 0.0), 3: (0.0, -1.0), 4: (0.0, 0.0)}
    edges = [(i, (i + 1) % 4) for i in range(4)] + [(i, 4, 8.0, 1.0) for i in range(4)]
    return PlanarGraph(positions, edges, [4])


def test_loop_erasures_on_known_path():
    assert forward_loop_erase(LOOPY) == (1, 3, 4)
    assert backward_loop_erase(LOOPY) == (1, 2, 3, 4)
    assert mixed_loop_erase(LOOPY, 0) == (1, 3, 4)
    assert mixed_loop_erase(LOOPY, len(LOOPY) - 1) == forward_loop_erase(LOOPY)
    with pytest.raises(GeometryError):
        mixed_loop_erase(LOOPY, len(LOOPY))
    with pytest.raises(GeometryError):
        forward_loop_erase([])


def test_mixed_erasure_has_forward_law():
    g = _absorbing_graph()
    forward, mixed = defaultdict(float), defaultdict(float)
    T, depth = 3, 14
    residual = 0.0
    stack = [((0,), 1.0)]
    while stack:
        path, p = stack.pop()
        v = path[-1]
        if v in g.boundary:
            forward[forward_loop_erase(path)] += p
            mixed[mixed_loop_erase(path, min(T, len(path) - 1))] += p
            continue
        if len(path) > depth:
            residual += p
            continue
        total = sum(g.weight(v, u) for u in g.neighbors(v))
        for u in g.neighbors(v):
            stack.append((path + (u,), p * g.weight(v, u) / total))
    assert residual <= 1e-9
    keys = set(forward) | set(mixed)
    tv = 0.5 * sum(abs(forward[k] - mixed[k]) for k in keys)
    assert tv <= 1e-6
    assert sum(forward.values()) + residual == pytest.approx(1.0)


def test_walks_stop_on_boundary(rng):
    g = disk_grid(0.25)
    start = g.nearest_vertex((0.0, 0.0))
    assert start == (0, 0)
    walk = random_walk(g, start, rng)
    assert walk[0] == start and walk[-1] in g.boundary
    assert all(v not in g.boundary for v in walk[:-1])
    branch = loop_erased_walk(g, start, rng)
    assert len(set(branch)) == len(branch)
    assert branch[-1] in g.boundary
    with pytest.raises(GeometryError):
        random_walk(square_box(50, 50), (25, 25), rng, max_steps=3)


@pytest.mark.parametrize("k, l", [(1, 1), (1, 3), (2, 2), (2, 3)])
def test_tree_count_matches_enumeration(k, l):
    g = square_patch(k, l)
    assert len(enumerate_wired_trees(g)) == round(count_wired_trees(g))


def test_two_by_two_patch_has_192_trees(patch_2x2):
    assert round(count_wired_trees(patch_2x2)) == 192
    with pytest.raises(CapExceededError):
        enumerate_wired_trees(patch_2x2, cap=10)


def test_wilson_is_uniform(patch_2x2, rng):
    support = [t.key() for t in enumerate_wired_trees(patch_2x2)]
    counts = Counter(wilson_ust(patch_2x2, rng=rng).key() for _ in range(20_000))
    assert set(counts) <= set(support)
    observed = np.array([counts[key] for key in support], dtype=float)
    assert stats.chisquare(observed).pvalue > 1e-3


@pytest.mark.slow
def test_wilson_is_uniform_at_full_sample_size():
    rng = derive_rng(4)
    for g in (square_patch(2, 2), square_patch(1, 3)):
        support = [t.key() for t in enumerate_wired_trees(g)]
        counts = Counter(wilson_ust(g, rng=rng).key() for _ in range(100_000))
        observed = np.array([counts[key] for key in support], dtype=float)
        assert stats.chisquare(observed).pvalue > 1e-3


def test_wilson_order_does_not_matter_for_validity(rng):
    g = disk_grid(0.2)
    tree = wilson_ust(g, order=list(reversed(g.interior)), rng=rng)
    assert set(tree.parent) == set(g.interior)
    for v in g.interior:
        assert tree.branch(v)[-1] in g.boundary


def test_partial_tree_and_subtree_distance(rng):
    g = disk_grid(0.125)
    outer = [v for v in g.interior if math.hypot(*g.position(v)) >= 0.5]
    tree = wilson_ust(g, order=outer, rng=rng, complete=False)
    assert set(outer) <= set(tree.parent)
    sub = subtree_spanning(tree, outer)
    assert sub.edges <= tree.edges()
    assert 0.0 <= sub.distance < 0.75
    assert subtree_spanning(tree, []).distance == math.inf


def test_graph_and_tree_json(patch_2x2, rng):
    g = graph_from_json(patch_2x2.to_json())
    assert g.to_json() == patch_2x2.to_json()
    tree = wilson_ust(patch_2x2, rng=rng)
    assert tree_from_json(patch_2x2, tree_to_json(tree)).key() == tree.key()
    with pytest.raises(GeometryError):
        graph_from_json({"positions": {}})


def test_path_points(patch_2x2):
    points = path_points(patch_2x2, [(1, 1), (1, 2)], origin=(1.0, 1.0))
    assert points.tolist() == [0j, 1j]
