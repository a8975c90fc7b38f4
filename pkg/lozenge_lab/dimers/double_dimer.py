"""Superposition of two tilings: doubled edges, loops and boundary paths."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import numpy as np

from lozenge_lab.dimers.hexlattice import (
    WHITE,
    DimerConfig,
    Edge,
    Face,
    HexDomain,
    Vertex,
    edge_distance,
    link_step,
    segment_edge,
    DIRECTIONS,
    triangle_corners,
    triangle_point,
)
from lozenge_lab.dimers.sampler import extremal_heights
from lozenge_lab.errors import DomainError, GeometryError, MatchingError

LOOP = "loop"
PATH = "path"


@dataclass(frozen=True)
class Component:
    """A loop or a path of the superposition.

    Loops are listed clockwise from their smallest vertex; paths start at
    their smallest endpoint. ``orientation`` is +1 when the white-to-black
    steps of that traversal belong to the first configuration and -1 when
    they belong to the second.
    """

    kind: str
    vertices: Tuple[Vertex, ...]
    orientation: Optional[int] = None

    def steps(self) -> List[Tuple[Vertex, Vertex]]:
        pairs = list(zip(self.vertices, self.vertices[1:]))
        if self.kind == LOOP:
            pairs.append((self.vertices[-1], self.vertices[0]))
        return pairs

    def edges(self) -> FrozenSet[Edge]:
        return frozenset(_edge(a, b) for a, b in self.steps())

    def split(self, orientation: Optional[int] = None) -> Tuple[Set[Edge], Set[Edge]]:
        """Edges of the component owned by the first and by the second configuration."""
        sign = self.orientation if orientation is None else orientation
        if sign not in (1, -1):
            raise GeometryError("Component has no orientation")
        first: Set[Edge] = set()
        second: Set[Edge] = set()
        for a, b in self.steps():
            forward = a[2] == WHITE
            owner = first if (forward == (sign == 1)) else second
            owner.add(_edge(a, b))
        return first, second

    def with_orientation(self, orientation: int) -> "Component":
        return Component(self.kind, self.vertices, orientation)


def _edge(a: Vertex, b: Vertex) -> Edge:
    return (a, b) if a[2] == WHITE else (b, a)


@dataclass(frozen=True)
class LoopDecomposition:
    domain: HexDomain
    domain2: HexDomain
    doubled: FrozenSet[Edge]
    components: Tuple[Component, ...]

    @property
    def loops(self) -> Tuple[Component, ...]:
        return tuple(c for c in self.components if c.kind == LOOP)

    @property
    def paths(self) -> Tuple[Component, ...]:
        return tuple(c for c in self.components if c.kind == PATH)

    def configurations(self) -> Tuple[FrozenSet[Edge], FrozenSet[Edge]]:
        """Edge sets of the two superimposed configurations."""
        first, second = set(self.doubled), set(self.doubled)
        for component in self.components:
            a, b = component.split()
            first |= a
            second |= b
        return frozenset(first), frozenset(second)

    def to_json(self) -> Dict[str, object]:
        return decomposition_to_json(self)


def _signed_area(vertices: Tuple[Vertex, ...]) -> float:
    points = [triangle_point(v) for v in vertices]
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:] + points[:1]):
        area += x0 * y1 - x1 * y0
    return area / 2.0


def superimpose(m: DimerConfig, m2: DimerConfig) -> LoopDecomposition:
    """Decompose ``m`` (on ``G``) and ``m2`` (on ``G'``) into doubled edges, loops and paths."""
    doubled = m.edges & m2.edges
    adjacency: Dict[Vertex, List[Vertex]] = {}
    for edge in (m.edges ^ m2.edges):
        a, b = edge
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    seen: Set[Vertex] = set()
    components: List[Component] = []

    def walk(start: Vertex) -> List[Vertex]:
        order = [start]
        seen.add(start)
        previous, current = None, start
        while True:
            nxt = [n for n in adjacency[current] if n != previous and n not in seen]
            if not nxt:
                return order
            previous, current = current, nxt[0]
            seen.add(current)
            order.append(current)

    for v in sorted(v for v, ns in adjacency.items() if len(ns) == 1):
        if v in seen:
            continue
        order = walk(v)
        if order[-1] < order[0]:
            order.reverse()
        components.append(Component(PATH, tuple(order)))
    for v in sorted(adjacency):
        if v in seen:
            continue
        order = walk(v)
        if _signed_area(tuple(order)) > 0:
            order = [order[0]] + order[:0:-1]
        components.append(Component(LOOP, tuple(order)))

    oriented = []
    for component in components:
        a, b = component.steps()[0]
        forward = 1 if a[2] == WHITE else -1
        sign = forward if _edge(a, b) in m.edges else -forward
        first, second = component.split(sign)
        if not (first <= m.edges and second <= m2.edges):
            raise MatchingError(f"Edges of the {component.kind} at {a} do not alternate")
        oriented.append(component.with_orientation(sign))
    oriented.sort(key=lambda c: (c.kind, c.vertices[0]))
    return LoopDecomposition(m.domain, m2.domain, doubled, tuple(oriented))


def resample_orientations(d: LoopDecomposition,
                          rng: np.random.Generator) -> Tuple[DimerConfig, DimerConfig]:
    """Redraw every loop orientation by an independent fair coin; paths keep theirs."""
    coins = rng.random(len(d.loops)) < 0.5
    flips = iter(coins.tolist())
    components = tuple(
        c.with_orientation(1 if next(flips) else -1) if c.kind == LOOP else c
        for c in d.components
    )
    first, second = LoopDecomposition(d.domain, d.domain2, d.doubled, components).configurations()
    return DimerConfig(d.domain, first), DimerConfig(d.domain2, second)


def build_m_double_prime(m: DimerConfig, m2: DimerConfig) -> DimerConfig:
    """Tiling of ``G'`` equal to ``m2`` off the loops of ``m`` and ``m2`` and to ``m`` on them."""
    return m_double_prime_from(superimpose(m, m2))


def m_double_prime_from(d: LoopDecomposition) -> DimerConfig:
    """:func:`build_m_double_prime` for an existing decomposition."""
    first, second = d.configurations()
    loop_edges = frozenset().union(*(c.edges() for c in d.loops)) if d.loops else frozenset()
    edges = (second - loop_edges) | (loop_edges & first)
    return DimerConfig(d.domain2, frozenset(edges))


def paths_hit_ball(d: LoopDecomposition, r: float) -> bool:
    """Whether some path edge meets the open ball ``B(0, r)``."""
    origin = d.domain.origin
    return any(
        edge_distance(edge, origin) < r for path in d.paths for edge in path.edges()
    )


def loops_hit_ball(d: LoopDecomposition, r: float) -> bool:
    origin = d.domain.origin
    return any(
        edge_distance(edge, origin) < r for loop in d.loops for edge in loop.edges()
    )


@dataclass(frozen=True)
class DDHeight:
    """``(h_{M'} - h_M) / 3`` on the faces common to ``G`` and ``G'``."""

    values: Dict[Face, int]
    pin: Face

    def __getitem__(self, face: Face) -> int:
        return self.values[face]


def _common_links(domain: HexDomain, domain2: HexDomain) -> Tuple[Set[Vertex], List[Tuple[Face, int, Face, Edge]], Set[Face]]:
    common = set(domain.triangles) & set(domain2.triangles)
    if not common:
        raise DomainError("Domains do not overlap")
    faces = {c for t in common for c in triangle_corners(t)}
    links = []
    boundary: Set[Face] = set()
    for p in faces:
        for k in range(6):
            q = (p[0] + DIRECTIONS[k][0], p[1] + DIRECTIONS[k][1])
            edge = segment_edge(p, k)
            inside = (edge[0] in common) + (edge[1] in common)
            if inside == 1:
                boundary.add(p)
            if k < 3 and q in faces and inside == 2:
                links.append((p, k, q, edge))
    return common, links, boundary


def dd_height(d: LoopDecomposition, pin: Optional[Face] = None) -> DDHeight:
    """Double-dimer height, zero at ``pin`` (default: smallest boundary face of the common region).

    It jumps by one exactly across loop and path edges: entering a positive
    loop raises it by one.
    """
    first, second = d.configurations()
    _, links, boundary = _common_links(d.domain, d.domain2)
    pin = min(boundary) if pin is None else pin
    adjacency: Dict[Face, List[Tuple[Face, int]]] = {}
    for p, k, q, edge in links:
        step = (link_step(k, edge in second) - link_step(k, edge in first)) // 3
        adjacency.setdefault(p, []).append((q, step))
        adjacency.setdefault(q, []).append((p, -step))
    if pin not in adjacency:
        raise DomainError(f"Pin {pin} is not a face of the common region")
    values = {pin: 0}
    queue = deque([pin])
    while queue:
        p = queue.popleft()
        for q, step in adjacency[p]:
            if q not in values:
                values[q] = values[p] + step
                queue.append(q)
            elif values[q] != values[p] + step:
                raise MatchingError(f"Double-dimer height is not consistent at {q}")
    return DDHeight(values=values, pin=pin)


def boundary_discrepancy(domain: HexDomain, domain2: HexDomain) -> float:
    """Smallest ``K`` (cube units) with ``|h_{M'} - h_M| <= K`` on the boundary of ``G cap G'``.

    Taken over all tilings ``M`` of ``domain`` and ``M'`` of ``domain2``,
    with both height functions zero at a common boundary face and the best
    global shift of ``h_{M'}``.
    """
    shared = sorted(domain.boundary_faces & domain2.boundary_faces)
    if not shared:
        raise DomainError("Domains share no boundary face to pin heights at")
    pin = shared[0]
    low1, high1 = extremal_heights(domain)
    low2, high2 = extremal_heights(domain2)
    shift1, shift2 = high1[pin], high2[pin]
    _, _, boundary = _common_links(domain, domain2)
    hi = max((high2[v] - shift2) - (low1[v] - shift1) for v in boundary)
    lo = min((low2[v] - shift2) - (high1[v] - shift1) for v in boundary)
    centre = -(hi + lo) / 2.0
    candidates = (3 * math.floor(centre / 3), 3 * math.ceil(centre / 3))
    best = min(max(hi + c, -(lo + c)) for c in candidates)
    return best / 3.0


def decomposition_to_json(d: LoopDecomposition) -> Dict[str, object]:
    return {
        "doubled": [[list(a), list(b)] for a, b in sorted(d.doubled)],
        "components": [
            {
                "kind": c.kind,
                "vertices": [list(v) for v in c.vertices],
                "orientation": c.orientation,
            }
            for c in d.components
        ],
    }
