"""Random walks, loop erasures and wired uniform spanning trees."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from lozenge_lab.errors import CapExceededError, GeometryError
from lozenge_lab.trees.graph import Node, PlanarGraph, Point, _name, _parse_name

WalkPath = Tuple[Node, ...]


# ---------------------------------------------------------------------------
# Loop erasures
# ---------------------------------------------------------------------------


def forward_loop_erase(x: Sequence[Node]) -> WalkPath:
    """Chronological loop erasure: cycles are removed as soon as they close."""
    if not x:
        raise GeometryError("Cannot erase an empty path")
    path: List[Node] = []
    position: Dict[Node, int] = {}
    for v in x:
        if v in position:
            cut = position[v] + 1
            for u in path[cut:]:
                del position[u]
            del path[cut:]
        else:
            position[v] = len(path)
            path.append(v)
    return tuple(path)


def backward_loop_erase(x: Sequence[Node]) -> WalkPath:
    """Loop erasure of the time reversal, reversed back."""
    return forward_loop_erase(list(reversed(x)))[::-1]


def mixed_loop_erase(x: Sequence[Node], T: int) -> WalkPath:
    """Forward erasure up to time ``T`` glued to the backward erasure afterwards.

    With ``Y`` the forward erasure of ``x[:T+1]``, ``S`` the first index of
    ``Y`` visited by ``x`` at or after ``T`` and ``tau`` the last visit of
    ``Y[S]``, the result is ``Y[:S+1]`` followed by the backward erasure of
    ``x[tau:]``.
    """
    if not x:
        raise GeometryError("Cannot erase an empty path")
    if not 0 <= T < len(x):
        raise GeometryError(f"Split time {T} outside 0..{len(x) - 1}")
    head = forward_loop_erase(x[: T + 1])
    future = set(x[T:])
    S = next(s for s, v in enumerate(head) if v in future)
    anchor = head[S]
    tau = max(t for t, v in enumerate(x) if v == anchor)
    tail = backward_loop_erase(x[tau:])
    return head[: S + 1] + tail[1:]


# ---------------------------------------------------------------------------
# Walks
# ---------------------------------------------------------------------------


def random_walk(g: PlanarGraph, start: Node, rng: np.random.Generator,
                targets: Optional[Set[Node]] = None,
                max_steps: Optional[int] = None) -> WalkPath:
    """Walk from ``start`` until it enters ``targets`` (default: the boundary)."""
    stop = g.boundary if targets is None else targets
    path = [start]
    v = start
    while v not in stop:
        if max_steps is not None and len(path) > max_steps:
            raise GeometryError(f"Walk did not stop within {max_steps} steps")
        v = g.step(v, rng)
        path.append(v)
    return tuple(path)


def loop_erased_walk(g: PlanarGraph, start: Node, rng: np.random.Generator,
                     targets: Optional[Set[Node]] = None) -> WalkPath:
    """Loop-erased walk from ``start`` to ``targets``, erased as it is generated."""
    stop = g.boundary if targets is None else targets
    path = [start]
    position = {start: 0}
    v = start
    while v not in stop:
        v = g.step(v, rng)
        if v in position:
            cut = position[v] + 1
            for u in path[cut:]:
                del position[u]
            del path[cut:]
        else:
            position[v] = len(path)
            path.append(v)
    return tuple(path)


# ---------------------------------------------------------------------------
# Wired spanning trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WiredTree:
    """Spanning forest of ``graph`` in which every branch ends on the boundary."""

    graph: PlanarGraph
    parent: Mapping[Node, Node]

    def branch(self, v: Node) -> WalkPath:
        """Path from ``v`` along parent pointers down to the boundary."""
        path = [v]
        while path[-1] not in self.graph.boundary:
            try:
                path.append(self.parent[path[-1]])
            except KeyError:
                raise GeometryError(f"{path[-1]} has no parent") from None
            if len(path) > len(self.parent) + 1:
                raise GeometryError("Parent pointers contain a cycle")
        return tuple(path)

    def edges(self) -> FrozenSet[Tuple[Node, Node]]:
        return frozenset(self.parent.items())

    def key(self) -> Tuple[Tuple[str, str], ...]:
        """Hashable canonical form."""
        return tuple(sorted((_name(v), _name(p)) for v, p in self.parent.items()))

    def to_json(self) -> List[List[str]]:
        return [list(pair) for pair in self.key()]


def tree_to_json(t: WiredTree) -> List[List[str]]:
    """Parent pairs ``[child, parent]`` sorted by child name."""
    return t.to_json()


def tree_from_json(g: PlanarGraph, data: Sequence[Sequence[str]]) -> WiredTree:
    parent = {_parse_name(v): _parse_name(p) for v, p in data}
    return _checked_tree(g, parent)


def _checked_tree(g: PlanarGraph, parent: Mapping[Node, Node]) -> WiredTree:
    missing = set(g.interior) - set(parent)
    if missing:
        raise GeometryError(f"{len(missing)} interior vertices have no parent")
    for v, p in parent.items():
        if not g.graph.has_edge(v, p):
            raise GeometryError(f"{v}->{p} is not an edge")
    tree = WiredTree(g, dict(parent))
    for v in g.interior:
        tree.branch(v)
    return tree


def wilson_ust(g: PlanarGraph, order: Optional[Sequence[Node]] = None,
               rng: Optional[np.random.Generator] = None,
               complete: bool = True) -> WiredTree:
    """Wilson's algorithm with the boundary wired.

    Branches are added as loop-erased walks started from the vertices of
    ``order`` in turn and stopped on the current tree. With ``complete``
    false the remaining vertices are skipped, so the result only holds the
    branches from ``order``: the subtree they span, with its exact law.
    """
    rng = rng or np.random.default_rng()
    order = list(g.interior) if order is None else list(order)
    in_tree: Set[Node] = set(g.boundary)
    parent: Dict[Node, Node] = {}
    for v in itertools.chain(order, g.interior if complete else ()):
        if v in in_tree:
            continue
        branch = loop_erased_walk(g, v, rng, targets=in_tree)
        for a, b in zip(branch, branch[1:]):
            parent[a] = b
        in_tree.update(branch)
    return WiredTree(g, parent)


@dataclass(frozen=True)
class SubTree:
    edges: FrozenSet[Tuple[Node, Node]]
    distance: float


def _segment_distance(p: Point, a: Point, b: Point) -> float:
    (px, py), (ax, ay), (bx, by) = p, a, b
    dx, dy = bx - ax, by - ay
    length2 = dx * dx + dy * dy
    t = 0.0 if length2 == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / length2))
    return math.hypot(px - ax - t * dx, py - ay - t * dy)


def subtree_spanning(t: WiredTree, vertices: Iterable[Node],
                     point: Point = (0.0, 0.0)) -> SubTree:
    """Union of the branches from ``vertices``, with its distance to ``point``."""
    edges: Set[Tuple[Node, Node]] = set()
    for v in vertices:
        branch = t.branch(v)
        edges.update(zip(branch, branch[1:]))
    g = t.graph
    if edges:
        distance = min(_segment_distance(point, g.position(a), g.position(b)) for a, b in edges)
    else:
        distance = math.inf
    return SubTree(frozenset(edges), distance)


def count_wired_trees(g: PlanarGraph) -> float:
    """Weighted number of wired spanning trees (matrix-tree theorem)."""
    interior = list(g.interior)
    index = {v: i for i, v in enumerate(interior)}
    laplacian = np.zeros((len(interior), len(interior)))
    for v in interior:
        for u in g.neighbors(v):
            w = g.weight(v, u)
            laplacian[index[v], index[v]] += w
            if u in index:
                laplacian[index[v], index[u]] -= w
    return float(np.linalg.det(laplacian))


def tree_weight(t: WiredTree) -> float:
    return float(np.prod([t.graph.weight(v, p) for v, p in t.parent.items()]))


def enumerate_wired_trees(g: PlanarGraph, cap: int = 10_000) -> List[WiredTree]:
    """Every wired spanning tree of ``g``, in canonical order."""
    interior = list(g.interior)
    choices = [g.neighbors(v) for v in interior]
    found = []
    for combo in itertools.product(*choices):
        parent = dict(zip(interior, combo))
        if _reaches_boundary(g, parent):
            found.append(WiredTree(g, parent))
            if len(found) > cap:
                raise CapExceededError(f"More than {cap} spanning trees")
    return sorted(found, key=WiredTree.key)


def _reaches_boundary(g: PlanarGraph, parent: Mapping[Node, Node]) -> bool:
    good: Set[Node] = set(g.boundary)
    for v in parent:
        trail = []
        u = v
        while u not in good:
            if u in trail:
                return False
            trail.append(u)
            u = parent[u]
        good.update(trail)
    return True

