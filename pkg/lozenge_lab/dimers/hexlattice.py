"""Hexagonal lattice domains, lozenge tilings and their height functions.

Coordinates
-----------
Faces of the hexagonal lattice are the points ``(u, v)`` of the triangular
lattice, embedded at ``u * (1, 0) + v * (1/2, sqrt(3)/2)``. Vertices of the
hexagonal lattice are the unit triangles: the up-triangle ``(u, v, WHITE)``
with corners ``(u, v), (u+1, v), (u, v+1)`` and the down-triangle
``(u, v, BLACK)`` with corners ``(u+1, v), (u, v+1), (u+1, v+1)``. A dimer
is a pair of triangles sharing a side, i.e. a lozenge, stored white first.

Heights live on faces. Moving from a face to a neighbouring face crosses one
hexagonal edge; the height changes by +1 if that edge is unmatched and by -2
if it is matched when the white triangle is on the right of the move, and by
the negatives otherwise. An elementary cube flip changes one height by 3.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from lozenge_lab.errors import (
    CapExceededError,
    DomainError,
    MatchingError,
    UntileableDomainError,
)

Face = Tuple[int, int]
Vertex = Tuple[int, int, int]
Edge = Tuple[Vertex, Vertex]
Point = Tuple[float, float]

WHITE = 0
BLACK = 1

SQRT3_2 = math.sqrt(3.0) / 2.0

# Neighbouring face offsets, counterclockwise from east.
DIRECTIONS: Tuple[Face, ...] = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

# For the segment from face p to p + DIRECTIONS[k]: offsets from p of the white
# and black triangles sharing it. The white one is on the right iff k is odd.
SEGMENT_TRIANGLES: Tuple[Tuple[Face, Face], ...] = (
    ((0, 0), (0, -1)),
    ((0, 0), (-1, 0)),
    ((-1, 0), (-1, 0)),
    ((-1, 0), (-1, -1)),
    ((0, -1), (-1, -1)),
    ((0, -1), (0, -1)),
)

UNMATCHED_STEP: Tuple[int, ...] = tuple(1 if k % 2 else -1 for k in range(6))
MATCHED_STEP: Tuple[int, ...] = tuple(-2 if k % 2 else 2 for k in range(6))

# Black neighbour offsets of a white triangle, one per lozenge type.
LOZENGE_TYPES: Dict[Face, str] = {(0, 0): "a", (-1, 0): "b", (0, -1): "c"}

# Unit step in Z^3 lifting a boundary segment in direction k.
_BOUNDARY_AXIS = (0, 1, 2, 0, 1, 2)


def face_point(face: Face) -> Point:
    """Planar position of a face centre."""
    u, v = face
    return (u + v / 2.0, v * SQRT3_2)


def triangle_corners(t: Vertex) -> Tuple[Face, Face, Face]:
    u, v, color = t
    if color == WHITE:
        return ((u, v), (u + 1, v), (u, v + 1))
    return ((u + 1, v), (u, v + 1), (u + 1, v + 1))


def triangle_point(t: Vertex) -> Point:
    """Planar position of the centroid of triangle ``t``."""
    u, v, color = t
    shift = 1.0 / 3.0 if color == WHITE else 2.0 / 3.0
    return face_point((u + shift, v + shift))  # type: ignore[arg-type]


def triangle_neighbors(t: Vertex) -> Tuple[Vertex, Vertex, Vertex]:
    """Lattice neighbours of ``t`` in canonical order."""
    u, v, color = t
    if color == WHITE:
        return ((u, v, BLACK), (u - 1, v, BLACK), (u, v - 1, BLACK))
    return ((u, v, WHITE), (u + 1, v, WHITE), (u, v + 1, WHITE))


def make_edge(a: Vertex, b: Vertex) -> Edge:
    """Return the edge ``{a, b}`` stored white first."""
    if a[2] == WHITE and b[2] == BLACK:
        edge = (a, b)
    elif a[2] == BLACK and b[2] == WHITE:
        edge = (b, a)
    else:
        raise MatchingError(f"{a} and {b} have the same colour")
    if edge[1] not in triangle_neighbors(edge[0]):
        raise MatchingError(f"{a} and {b} are not adjacent")
    return edge


def lozenge_type(edge: Edge) -> str:
    """Orientation class ``"a"``, ``"b"`` or ``"c"`` of a lozenge."""
    white, black = edge
    return LOZENGE_TYPES[(black[0] - white[0], black[1] - white[1])]


def segment_edge(face: Face, k: int) -> Edge:
    """Hexagonal edge crossed when moving from ``face`` in direction ``k``."""
    (wu, wv), (bu, bv) = SEGMENT_TRIANGLES[k]
    u, v = face
    return ((u + wu, v + wv, WHITE), (u + bu, v + bv, BLACK))


def edge_segment(edge: Edge) -> Tuple[Point, Point]:
    return triangle_point(edge[0]), triangle_point(edge[1])


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    length2 = dx * dx + dy * dy
    t = 0.0 if length2 == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / length2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def edge_distance(edge: Edge, face: Face) -> float:
    """Euclidean distance from the centre of ``face`` to the lozenge edge."""
    a, b = edge_segment(edge)
    return _point_segment_distance(face_point(face), a, b)


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HexDomain:
    """Finite simply connected union of lattice triangles.

    Use :meth:`from_triangles`, :meth:`from_faces` or :func:`build_hexagon`
    rather than the constructor; they validate the region.
    """

    triangles: FrozenSet[Vertex]
    origin: Face
    sides: Optional[Tuple[int, int, int]] = field(default=None, compare=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_triangles(
        cls,
        triangles: Iterable[Sequence[int]],
        origin: Optional[Face] = None,
        sides: Optional[Tuple[int, int, int]] = None,
    ) -> "HexDomain":
        tris = frozenset((int(t[0]), int(t[1]), int(t[2])) for t in triangles)
        if not tris:
            raise DomainError("Domain has no triangles")
        if any(t[2] not in (WHITE, BLACK) for t in tris):
            raise DomainError("Triangle colours must be 0 (white) or 1 (black)")
        _check_simply_connected(tris)
        if origin is None:
            origin = _central_face(tris)
        origin = (int(origin[0]), int(origin[1]))
        domain = cls(triangles=tris, origin=origin, sides=sides)
        if origin not in domain.face_index:
            raise DomainError(f"Origin {origin} is not a face of the domain")
        return domain

    @classmethod
    def from_faces(
        cls, faces: Iterable[Sequence[int]], origin: Optional[Face] = None
    ) -> "HexDomain":
        """Domain of all triangles whose three corners are in ``faces``."""
        face_set = {(int(f[0]), int(f[1])) for f in faces}
        tris = set()
        for u, v in face_set:
            for t in ((u, v, WHITE), (u - 1, v, BLACK)):
                if all(c in face_set for c in triangle_corners(t)):
                    tris.add(t)
        return cls.from_triangles(tris, origin=origin)

    def translate(self, du: int, dv: int, keep_origin: bool = True) -> "HexDomain":
        """Shifted copy; the origin stays put unless ``keep_origin`` is false."""
        tris = [(u + du, v + dv, c) for u, v, c in self.triangles]
        origin = self.origin if keep_origin else (self.origin[0] + du, self.origin[1] + dv)
        return HexDomain.from_triangles(tris, origin=origin)

    def remove_triangles(self, triangles: Iterable[Vertex]) -> "HexDomain":
        removed = set(triangles)
        return HexDomain.from_triangles(
            (t for t in self.triangles if t not in removed), origin=self.origin
        )

    # -- derived structure -------------------------------------------------

    @cached_property
    def vertices(self) -> Tuple[Vertex, ...]:
        return tuple(sorted(self.triangles))

    @cached_property
    def whites(self) -> Tuple[Vertex, ...]:
        return tuple(t for t in self.vertices if t[2] == WHITE)

    @cached_property
    def blacks(self) -> Tuple[Vertex, ...]:
        return tuple(t for t in self.vertices if t[2] == BLACK)

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        """All lattice edges with both endpoints in the domain, sorted."""
        found = [
            (w, b)
            for w in self.whites
            for b in triangle_neighbors(w)
            if b in self.triangles
        ]
        return tuple(sorted(found))

    @cached_property
    def edge_index(self) -> Dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def faces(self) -> Tuple[Face, ...]:
        corners = {c for t in self.triangles for c in triangle_corners(t)}
        return tuple(sorted(corners))

    @cached_property
    def face_index(self) -> Dict[Face, int]:
        return {f: i for i, f in enumerate(self.faces)}

    @cached_property
    def face_links(self) -> Tuple[Tuple[Face, int, Face, Edge, int], ...]:
        """Adjacent face pairs ``(p, k, q, edge, kind)``.

        ``kind`` is 2 when both triangles of the segment are in the domain
        (the edge may be matched), 1 when exactly one is (never matched).
        Each unordered pair appears once, with ``k`` in ``0..2``.
        """
        links = []
        for p in self.faces:
            for k in range(3):
                q = (p[0] + DIRECTIONS[k][0], p[1] + DIRECTIONS[k][1])
                if q not in self.face_index:
                    continue
                edge = segment_edge(p, k)
                inside = (edge[0] in self.triangles) + (edge[1] in self.triangles)
                if inside:
                    links.append((p, k, q, edge, inside))
        return tuple(links)

    @cached_property
    def boundary_faces(self) -> FrozenSet[Face]:
        return frozenset(
            f for p, _, q, _, kind in self.face_links if kind == 1 for f in (p, q)
        )

    @cached_property
    def interior_faces(self) -> Tuple[Face, ...]:
        """Faces whose six surrounding triangles all lie in the domain."""
        return tuple(
            f for f in self.faces
            if all(
                t in self.triangles
                for k in range(6)
                for t in segment_edge(f, k)
            )
        )

    @cached_property
    def pin(self) -> Face:
        """Canonical boundary face at which heights are pinned to zero."""
        return min(self.boundary_faces)

    @cached_property
    def radius(self) -> float:
        ox, oy = face_point(self.origin)
        return max(math.hypot(x - ox, y - oy) for x, y in map(face_point, self.faces))

    @cached_property
    def edge_distances(self) -> Dict[Edge, float]:
        return {e: edge_distance(e, self.origin) for e in self.edges}

    def neighbors(self, v: Vertex) -> Tuple[Vertex, ...]:
        """Neighbours of ``v`` inside the domain, in canonical order."""
        if v not in self.triangles:
            raise DomainError(f"{v} is not a vertex of the domain")
        return tuple(n for n in triangle_neighbors(v) if n in self.triangles)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def to_json(self) -> Dict[str, object]:
        return domain_to_json(self)


def _check_simply_connected(tris: FrozenSet[Vertex]) -> None:
    start = next(iter(tris))
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for n in triangle_neighbors(t):
            if n in tris and n not in seen:
                seen.add(n)
                queue.append(n)
    if len(seen) != len(tris):
        raise DomainError("Domain is not connected")

    us = [t[0] for t in tris]
    vs = [t[1] for t in tris]
    lo_u, hi_u, lo_v, hi_v = min(us) - 2, max(us) + 2, min(vs) - 2, max(vs) + 2

    def in_box(t: Vertex) -> bool:
        return lo_u <= t[0] <= hi_u and lo_v <= t[1] <= hi_v

    outside = (lo_u, lo_v, WHITE)
    seen = {outside}
    queue = deque([outside])
    while queue:
        t = queue.popleft()
        for n in triangle_neighbors(t):
            if in_box(n) and n not in tris and n not in seen:
                seen.add(n)
                queue.append(n)
    box_size = 2 * (hi_u - lo_u + 1) * (hi_v - lo_v + 1)
    if len(seen) + len(tris) != box_size:
        raise DomainError("Domain is not simply connected")


def _central_face(tris: FrozenSet[Vertex]) -> Face:
    faces = sorted({c for t in tris for c in triangle_corners(t)})
    points = [face_point(f) for f in faces]
    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)
    return min(
        faces,
        key=lambda f: (round(math.hypot(face_point(f)[0] - cx, face_point(f)[1] - cy), 9), f),
    )


def build_hexagon(a: int, b: int, c: int) -> HexDomain:
    """Hexagon with side lengths ``a, b, c, a, b, c``.

    The region is made of ``2(ab + bc + ca)`` unit triangles, the cells a
    tiling covers (six for ``(1, 1, 1)``). Heights live on the corners of
    those triangles, ``domain.faces``: the lattice points with
    ``0 <= v <= b + c``, ``-c <= u <= a`` and ``0 <= u + v <= a + b``, so
    ``(1, 1, 1)`` has seven of them, six on the rim around one centre.
    """
    for name, side in (("a", a), ("b", b), ("c", c)):
        if not isinstance(side, int) or isinstance(side, bool) or side <= 0:
            raise DomainError(f"Side {name} must be a positive integer, got {side!r}")
    faces = [
        (u, v)
        for v in range(0, b + c + 1)
        for u in range(-c, a + 1)
        if 0 <= u + v <= a + b
    ]
    domain = HexDomain.from_faces(faces)
    return HexDomain(triangles=domain.triangles, origin=domain.origin, sides=(a, b, c))


def domain_to_json(domain: HexDomain) -> Dict[str, object]:
    if domain.sides is not None:
        return {"sides": list(domain.sides), "origin": list(domain.origin)}
    return {
        "triangles": [list(t) for t in domain.vertices],
        "origin": list(domain.origin),
    }


def domain_from_json(data: Mapping[str, object]) -> HexDomain:
    """Inverse of :func:`domain_to_json`; also accepts a ``faces`` list."""
    origin = data.get("origin")
    if "sides" in data:
        a, b, c = data["sides"]  # type: ignore[misc]
        domain = build_hexagon(int(a), int(b), int(c))
        if origin is not None and tuple(origin) != domain.origin:  # type: ignore[arg-type]
            domain = HexDomain.from_triangles(
                domain.triangles, origin=tuple(origin), sides=domain.sides  # type: ignore[arg-type]
            )
        return domain
    if "triangles" in data:
        return HexDomain.from_triangles(data["triangles"], origin=origin)  # type: ignore[arg-type]
    if "faces" in data:
        return HexDomain.from_faces(data["faces"], origin=origin)  # type: ignore[arg-type]
    raise DomainError("Domain JSON needs one of 'sides', 'triangles' or 'faces'")


# ---------------------------------------------------------------------------
# Dimer configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DimerConfig:
    """Perfect matching of a domain."""

    domain: HexDomain
    edges: FrozenSet[Edge]

    def __post_init__(self) -> None:
        covered: Dict[Vertex, Edge] = {}
        for edge in self.edges:
            if edge not in self.domain.edge_index:
                raise MatchingError(f"{edge} is not an edge of the domain")
            for v in edge:
                if v in covered:
                    raise MatchingError(f"{v} is covered twice")
                covered[v] = edge
        if len(covered) != len(self.domain.triangles):
            raise MatchingError(
                f"Matching covers {len(covered)} of {len(self.domain.triangles)} vertices"
            )

    @classmethod
    def from_pairs(cls, domain: HexDomain, pairs: Iterable[Tuple[Vertex, Vertex]]) -> "DimerConfig":
        return cls(domain, frozenset(make_edge(a, b) for a, b in pairs))

    @classmethod
    def from_indices(cls, domain: HexDomain, indices: Iterable[int]) -> "DimerConfig":
        return cls(domain, frozenset(domain.edges[i] for i in indices))

    @cached_property
    def partner(self) -> Dict[Vertex, Vertex]:
        result: Dict[Vertex, Vertex] = {}
        for w, b in self.edges:
            result[w] = b
            result[b] = w
        return result

    def indices(self) -> List[int]:
        return sorted(self.domain.edge_index[e] for e in self.edges)

    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))


def is_tileable(domain: HexDomain) -> bool:
    if len(domain.whites) != len(domain.blacks):
        return False
    matching = nx.bipartite.hopcroft_karp_matching(domain.graph(), top_nodes=set(domain.whites))
    return len(matching) == len(domain.triangles)


def some_tiling(domain: HexDomain) -> DimerConfig:
    """Any tiling of ``domain``; raises if there is none."""
    if len(domain.whites) != len(domain.blacks):
        raise UntileableDomainError(
            f"Domain has {len(domain.whites)} white and {len(domain.blacks)} black triangles"
        )
    matching = nx.bipartite.hopcroft_karp_matching(domain.graph(), top_nodes=set(domain.whites))
    if len(matching) != len(domain.triangles):
        raise UntileableDomainError("Domain admits no lozenge tiling")
    return DimerConfig(domain, frozenset((w, matching[w]) for w in domain.whites))


def enumerate_tilings(domain: HexDomain, cap: int = 100_000) -> List[DimerConfig]:
    """All tilings of ``domain`` in canonical order.

    Raises :class:`CapExceededError` once more than ``cap`` tilings are found.
    """
    order = domain.vertices
    partner: Dict[Vertex, Vertex] = {}
    found: List[Tuple[Edge, ...]] = []

    def first_free(start: int) -> int:
        while start < len(order) and order[start] in partner:
            start += 1
        return start

    def extend(start: int) -> None:
        i = first_free(start)
        if i == len(order):
            found.append(tuple(sorted(make_edge(v, partner[v]) for v in order if v[2] == WHITE)))
            if len(found) > cap:
                raise CapExceededError(f"More than {cap} tilings")
            return
        v = order[i]
        for n in domain.neighbors(v):
            if n in partner:
                continue
            partner[v] = n
            partner[n] = v
            extend(i + 1)
            del partner[v]
            del partner[n]

    extend(0)
    return [DimerConfig(domain, frozenset(edges)) for edges in sorted(found)]


# ---------------------------------------------------------------------------
# Height functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeightField:
    """Integer heights on the faces of a domain, zero at ``pin``."""

    values: Mapping[Face, int]
    pin: Face
    domain: Optional["HexDomain"] = field(default=None, compare=False, repr=False)

    def __getitem__(self, face: Face) -> int:
        return self.values[face]

    def normalized(self, face: Face) -> Fraction:
        """Height in cube units (a flip changes it by one)."""
        return Fraction(self.values[face], 3)


def link_step(k: int, matched: bool) -> int:
    return MATCHED_STEP[k] if matched else UNMATCHED_STEP[k]


def height_field(m: DimerConfig, pin: Optional[Face] = None) -> HeightField:
    """Height function of ``m`` with ``h(pin) = 0`` (default pin: ``domain.pin``).

    Steps are +1 across an unmatched and -2 across a matched edge when the
    white triangle lies on the right of the move. This is the mirror image of
    the white-on-left convention; every height, and every difference of
    heights, is negated relative to it, while ``|h|`` bounds, flips by 3 and
    the cube-unit jumps of the double-dimer height are unchanged.
    """
    domain = m.domain
    pin = domain.pin if pin is None else pin
    if pin not in domain.face_index:
        raise DomainError(f"Pin {pin} is not a face of the domain")
    adjacency: Dict[Face, List[Tuple[Face, int]]] = {f: [] for f in domain.faces}
    for p, k, q, edge, kind in domain.face_links:
        step = link_step(k, kind == 2 and edge in m.edges)
        adjacency[p].append((q, step))
        adjacency[q].append((p, -step))
    values = {pin: 0}
    queue = deque([pin])
    while queue:
        p = queue.popleft()
        for q, step in adjacency[p]:
            expected = values[p] + step
            if q not in values:
                values[q] = expected
                queue.append(q)
            elif values[q] != expected:
                raise MatchingError(f"Height is not consistent around face {q}")
    if len(values) != len(domain.faces):
        raise DomainError("Face graph of the domain is disconnected")
    return HeightField(values=values, pin=pin, domain=domain)


def face_graph(domain: HexDomain) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(domain.faces)
    g.add_edges_from((p, q) for p, _, q, _, _ in domain.face_links)
    return g


def lipschitz_bound(h: HeightField, domain: Optional[HexDomain] = None) -> Fraction:
    """Smallest ``C`` with ``|h(f) - h(f')| <= C d(f, f') + C``.

    Distances are taken in the face graph of ``domain``, by default the
    domain ``h`` was computed on.
    """
    domain = domain if domain is not None else h.domain
    if domain is None:
        raise DomainError("Height field carries no domain")
    best = Fraction(0)
    for f, lengths in nx.all_pairs_shortest_path_length(face_graph(domain)):
        hf = h.values[f]
        for g, d in lengths.items():
            ratio = Fraction(abs(h.values[g] - hf), d + 1)
            if ratio > best:
                best = ratio
    return best


# ---------------------------------------------------------------------------
# Windows and boundaries
# ---------------------------------------------------------------------------


def local_window(m: DimerConfig, r: float) -> FrozenSet[Edge]:
    """Matched edges meeting the open ball ``B(origin, r)``."""
    domain = m.domain
    if r < 0:
        raise ValueError(f"Window radius must be non-negative, got {r}")
    if r > domain.radius:
        raise DomainError(f"Window radius {r} exceeds domain radius {domain.radius:.3f}")
    distances = domain.edge_distances
    return frozenset(e for e in m.edges if distances[e] < r)


def local_distance(m: DimerConfig, m2: DimerConfig) -> float:
    """``exp(-R)`` for the largest ``R`` such that ``m`` and ``m2`` agree on ``B(0, R)``."""
    if m.domain.origin != m2.domain.origin:
        raise DomainError("Configurations must share an origin")
    differing = m.edges ^ m2.edges
    if not differing:
        return 0.0
    return math.exp(-min(edge_distance(e, m.domain.origin) for e in differing))


def orientation_densities(m: DimerConfig, r: Optional[float] = None) -> Dict[str, float]:
    """Fractions of lozenges of each type, within ``B(0, r)`` if ``r`` is given."""
    edges = m.edges if r is None else local_window(m, r)
    counts = {"a": 0, "b": 0, "c": 0}
    for edge in edges:
        counts[lozenge_type(edge)] += 1
    total = sum(counts.values())
    if total == 0:
        return {key: 0.0 for key in counts}
    return {key: value / total for key, value in counts.items()}


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed lattice path in Z^3 lifting the domain boundary.

    ``points[i]`` lies over ``faces[i]``; the coordinate sum of a point equals
    the boundary height at that face, relative to the first one.
    """

    points: Tuple[Tuple[int, int, int], ...]
    faces: Tuple[Face, ...]

    def __len__(self) -> int:
        return len(self.points) - 1

    def to_json(self) -> List[List[int]]:
        return [list(p) for p in self.points]


def _boundary_segments(domain: HexDomain) -> Dict[Face, List[int]]:
    """Counterclockwise boundary segments, keyed by start face."""
    outgoing: Dict[Face, List[int]] = {}
    for p in domain.faces:
        for k in range(6):
            white, black = segment_edge(p, k)
            left, right = (black, white) if k % 2 else (white, black)
            if left in domain.triangles and right not in domain.triangles:
                outgoing.setdefault(p, []).append(k)
    return outgoing


def boundary_curve(domain: HexDomain) -> BoundaryCurve:
    """Lift the boundary of a tileable domain to a closed path in Z^3."""
    if not is_tileable(domain):
        raise UntileableDomainError("Domain admits no lozenge tiling")
    outgoing = _boundary_segments(domain)
    total = sum(len(ks) for ks in outgoing.values())
    start = min(outgoing)
    face, k = start, min(outgoing[start])
    start_segment = (face, k)
    points = [(0, 0, 0)]
    faces = [face]
    used = 0
    while True:
        used += 1
        x = list(points[-1])
        x[_BOUNDARY_AXIS[k]] += 1 if k % 2 else -1
        face = (face[0] + DIRECTIONS[k][0], face[1] + DIRECTIONS[k][1])
        points.append((x[0], x[1], x[2]))
        faces.append(face)
        back = (k + 3) % 6
        k = min(outgoing[face], key=lambda ko: (back - ko) % 6 or 6)
        if (face, k) == start_segment:
            break
        if used > total:
            raise DomainError("Boundary tracing did not close")
    if used != total:
        raise DomainError("Domain boundary has more than one component")
    if points[-1] != points[0]:
        raise UntileableDomainError("Boundary heights do not close up")
    return BoundaryCurve(points=tuple(points), faces=tuple(faces))
