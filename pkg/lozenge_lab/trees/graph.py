"""Finite planar graphs with a wired boundary."""

from __future__ import annotations

import math
from functools import cached_property
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from lozenge_lab.errors import GeometryError

Node = Hashable
Point = Tuple[float, float]


class PlanarGraph:
    """Straight-line embedded graph; random walks stop on ``boundary``.

    Edge weights may differ per direction: a walk at ``v`` moves to ``u``
    with probability proportional to ``weight(v, u)``.
    """

    def __init__(self, positions: Mapping[Node, Point],
                 edges: Iterable[Sequence[Any]],
                 boundary: Iterable[Node]) -> None:
        self.graph = nx.DiGraph()
        for node, (x, y) in positions.items():
            self.graph.add_node(node, pos=(float(x), float(y)))
        for edge in edges:
            a, b = edge[0], edge[1]
            w_ab = float(edge[2]) if len(edge) > 2 else 1.0
            w_ba = float(edge[3]) if len(edge) > 3 else w_ab
            if a not in self.graph or b not in self.graph:
                raise GeometryError(f"Edge {a}-{b} uses an unknown vertex")
            if w_ab <= 0 or w_ba <= 0:
                raise GeometryError(f"Edge {a}-{b} has a non-positive weight")
            self.graph.add_edge(a, b, weight=w_ab)
            self.graph.add_edge(b, a, weight=w_ba)
        self.boundary: FrozenSet[Node] = frozenset(boundary)
        unknown = self.boundary - set(self.graph.nodes)
        if unknown:
            raise GeometryError(f"Boundary vertices {sorted(map(str, unknown))} are not in the graph")
        if not self.boundary:
            raise GeometryError("Wired boundary is empty")

    @property
    def vertices(self) -> List[Node]:
        return sorted(self.graph.nodes, key=_sort_key)

    @cached_property
    def interior(self) -> Tuple[Node, ...]:
        return tuple(v for v in self.vertices if v not in self.boundary)

    def position(self, v: Node) -> Point:
        return self.graph.nodes[v]["pos"]

    def weight(self, a: Node, b: Node) -> float:
        return self.graph.edges[a, b]["weight"]

    @cached_property
    def rotation(self) -> Dict[Node, Tuple[Node, ...]]:
        """Neighbours of every vertex in counterclockwise order."""
        result = {}
        for v in self.graph.nodes:
            x, y = self.position(v)
            result[v] = tuple(sorted(
                self.graph.successors(v),
                key=lambda u: math.atan2(self.position(u)[1] - y, self.position(u)[0] - x),
            ))
        return result

    def neighbors(self, v: Node) -> Tuple[Node, ...]:
        return self.rotation[v]

    @cached_property
    def _transitions(self) -> Dict[Node, Tuple[Tuple[Node, ...], np.ndarray]]:
        table = {}
        for v in self.graph.nodes:
            nbrs = self.rotation[v]
            if not nbrs:
                continue
            weights = np.array([self.weight(v, u) for u in nbrs], dtype=float)
            table[v] = (nbrs, np.cumsum(weights) / weights.sum())
        return table

    def step(self, v: Node, rng: np.random.Generator) -> Node:
        """One random-walk step from ``v``."""
        try:
            nbrs, cumulative = self._transitions[v]
        except KeyError:
            raise GeometryError(f"Vertex {v} has no neighbours") from None
        index = int(np.searchsorted(cumulative, rng.random(), side="right"))
        return nbrs[min(index, len(nbrs) - 1)]

    def undirected_edges(self) -> List[Tuple[Node, Node]]:
        seen = set()
        result = []
        for a, b in self.graph.edges:
            key = frozenset((a, b))
            if key not in seen:
                seen.add(key)
                result.append(tuple(sorted((a, b), key=_sort_key)))
        return sorted(result, key=lambda e: (_sort_key(e[0]), _sort_key(e[1])))

    def nearest_vertex(self, point: Point) -> Node:
        px, py = point
        return min(
            self.vertices,
            key=lambda v: (math.hypot(self.position(v)[0] - px, self.position(v)[1] - py), _sort_key(v)),
        )

    def to_json(self) -> Dict[str, Any]:
        names = {v: _name(v) for v in self.graph.nodes}
        return {
            "positions": {names[v]: list(self.position(v)) for v in self.vertices},
            "edges": [
                [names[a], names[b], self.weight(a, b), self.weight(b, a)]
                for a, b in self.undirected_edges()
            ],
            "boundary": sorted(names[v] for v in self.boundary),
        }


def _sort_key(v: Node) -> Tuple[int, Any]:
    if isinstance(v, tuple):
        return (0, v)
    return (1, str(v))


def _name(v: Node) -> str:
    if isinstance(v, tuple):
        return ",".join(str(c) for c in v)
    return str(v)


def _parse_name(name: str) -> Node:
    parts = name.split(",")
    try:
        return tuple(int(p) for p in parts) if len(parts) > 1 else int(name)
    except ValueError:
        return name


def graph_from_json(data: Mapping[str, Any]) -> PlanarGraph:
    """Inverse of :meth:`PlanarGraph.to_json`."""
    try:
        positions = {_parse_name(k): tuple(v) for k, v in data["positions"].items()}
        edges = [
            (_parse_name(e[0]), _parse_name(e[1]), *e[2:]) for e in data["edges"]
        ]
        boundary = [_parse_name(b) for b in data["boundary"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise GeometryError(f"Malformed graph JSON: {exc}") from exc
    return PlanarGraph(positions, edges, boundary)


def square_patch(k: int, l: int) -> PlanarGraph:
    """``k x l`` block of the square lattice wired to its surrounding ring.

    Interior vertices are ``(i, j)`` with ``1 <= i <= k, 1 <= j <= l``;
    each one next to the border is joined to a ring vertex outside the block.
    Corner points of the ring are not vertices.
    """
    if k <= 0 or l <= 0:
        raise GeometryError("Patch sides must be positive")
    interior = [(i, j) for i in range(1, k + 1) for j in range(1, l + 1)]
    ring = (
        [(0, j) for j in range(1, l + 1)] + [(k + 1, j) for j in range(1, l + 1)]
        + [(i, 0) for i in range(1, k + 1)] + [(i, l + 1) for i in range(1, k + 1)]
    )
    positions = {v: (float(v[0]), float(v[1])) for v in interior + ring}
    present = set(positions)
    inner = set(interior)
    edges = []
    for i, j in interior:
        for di, dj in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            u = (i + di, j + dj)
            if u in present and (u not in inner or (di, dj) in ((1, 0), (0, 1))):
                edges.append(((i, j), u))
    return PlanarGraph(positions, edges, ring)


def disk_grid(delta: float, radius: float = 1.0) -> PlanarGraph:
    """Square lattice of mesh ``delta`` inside the open disk of given radius.

    Vertices are integer pairs ``(i, j)`` placed at ``delta * (i, j)``. Lattice
    points outside the disk adjacent to an inside point form the boundary.
    """
    if delta <= 0 or radius <= 0:
        raise GeometryError("Mesh and radius must be positive")
    n = int(math.ceil(radius / delta)) + 1
    inside = {
        (i, j)
        for i in range(-n, n + 1)
        for j in range(-n, n + 1)
        if math.hypot(i * delta, j * delta) < radius
    }
    if (0, 0) not in inside:
        raise GeometryError("Disk contains no lattice point")
    boundary = set()
    edges = []
    for i, j in inside:
        for di, dj in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            u = (i + di, j + dj)
            if u not in inside:
                boundary.add(u)
                edges.append(((i, j), u))
            elif (di, dj) in ((1, 0), (0, 1)):
                edges.append(((i, j), u))
    positions = {v: (v[0] * delta, v[1] * delta) for v in inside | boundary}
    return PlanarGraph(positions, edges, boundary)


def square_box(width: int, height: int) -> PlanarGraph:
    """All lattice points of ``[0, width] x [0, height]``; the perimeter is wired."""
    if width < 2 or height < 2:
        raise GeometryError("Box must be at least 2 x 2")
    nodes = [(i, j) for i in range(width + 1) for j in range(height + 1)]
    positions = {v: (float(v[0]), float(v[1])) for v in nodes}
    edges = [((i, j), (i + 1, j)) for i in range(width) for j in range(height + 1)]
    edges += [((i, j), (i, j + 1)) for i in range(width + 1) for j in range(height)]
    boundary = [v for v in nodes if v[0] in (0, width) or v[1] in (0, height)]
    return PlanarGraph(positions, edges, boundary)


def path_points(g: PlanarGraph, path: Sequence[Node],
                origin: Optional[Point] = None) -> np.ndarray:
    """Positions of ``path`` as complex numbers, relative to ``origin``."""
    ox, oy = origin or (0.0, 0.0)
    return np.array(
        [complex(g.position(v)[0] - ox, g.position(v)[1] - oy) for v in path],
        dtype=complex,
    )
