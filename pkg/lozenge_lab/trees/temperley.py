"""Temperley's bijection between wired spanning trees and dimers.

For a planar graph ``G`` with wired boundary, the dimer graph ``G_D`` has
one vertex per interior vertex of ``G`` and per bounded face except a root
face on the boundary ring with the fewest interior edges (the black
vertices), and one vertex per edge midpoint (the white vertices). A tree
edge ``v -> parent(v)`` matches ``v`` with that edge's midpoint; the dual
tree, oriented towards the root face, matches every other face with the
midpoint of its outgoing dual edge.

Faces of ``G`` are found from the straight-line embedding after joining
consecutive boundary vertices by a ring, so ``G`` is expected to be a patch
whose boundary vertices surround it (see :func:`square_patch`).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from lozenge_lab.errors import GeometryError, MatchingError
from lozenge_lab.trees.graph import Node, PlanarGraph, _sort_key
from lozenge_lab.trees.ust import WiredTree, _checked_tree
from lozenge_lab.trees.winding import winding_intrinsic

DNode = Tuple[str, object]
DimerMatching = FrozenSet[Tuple[DNode, DNode]]

QUARTER = Fraction(1, 4)


def _edge_key(a: Node, b: Node) -> Tuple[Node, Node]:
    return (a, b) if _sort_key(a) <= _sort_key(b) else (b, a)


@dataclass(frozen=True)
class TemperleyGraph:
    """``G_D`` of a patch.

    ``ring`` lists the boundary vertices counterclockwise, starting right
    after the ring edge of the root face.
    """

    graph: PlanarGraph
    faces: Tuple[Tuple[Node, ...], ...]
    left_face: Dict[Tuple[Node, Node], int]
    root_face: int
    ring: Tuple[Node, ...]
    edges: Tuple[Tuple[Node, Node], ...]
    adjacency: Dict[DNode, Tuple[DNode, ...]]

    @property
    def whites(self) -> List[DNode]:
        return sorted((n for n in self.adjacency if n[0] == "e"), key=repr)

    @property
    def blacks(self) -> List[DNode]:
        return sorted((n for n in self.adjacency if n[0] != "e"), key=repr)

    def face_of(self, a: Node, b: Node) -> int:
        """Index of the face on the left of the half-edge ``a -> b``."""
        return self.left_face[(a, b)]

    def position(self, node: DNode) -> complex:
        kind, value = node
        g = self.graph
        if kind == "v":
            x, y = g.position(value)
            return complex(x, y)
        if kind == "f":
            pts = [complex(*g.position(v)) for v in self.faces[value]]  # type: ignore[index]
            return sum(pts) / len(pts)
        a, b = value  # type: ignore[misc]
        return (complex(*g.position(a)) + complex(*g.position(b))) / 2


def _ring(g: PlanarGraph) -> List[Tuple[Node, Node]]:
    interior = [complex(*g.position(v)) for v in g.interior] or [complex(*g.position(v)) for v in g.boundary]
    centre = sum(interior) / len(interior)
    ordered = sorted(
        g.boundary,
        key=lambda v: math.atan2(g.position(v)[1] - centre.imag, g.position(v)[0] - centre.real),
    )
    return [(ordered[i], ordered[(i + 1) % len(ordered)]) for i in range(len(ordered))]


def _trace_faces(rotation: Dict[Node, List[Node]], positions: Dict[Node, complex]
                 ) -> Tuple[List[Tuple[Node, ...]], Dict[Tuple[Node, Node], int]]:
    faces: List[Tuple[Node, ...]] = []
    left: Dict[Tuple[Node, Node], int] = {}
    for a in rotation:
        for b in rotation[a]:
            if (a, b) in left:
                continue
            cycle = []
            u, v = a, b
            while (u, v) not in left:
                left[(u, v)] = len(faces)
                cycle.append(u)
                nbrs = rotation[v]
                w = nbrs[(nbrs.index(u) - 1) % len(nbrs)]
                u, v = v, w
            faces.append(tuple(cycle))
    return faces, left


def _area(cycle: Sequence[Node], positions: Dict[Node, complex]) -> float:
    pts = [positions[v] for v in cycle]
    return sum((p.conjugate() * q).imag for p, q in zip(pts, pts[1:] + pts[:1])) / 2.0


@lru_cache(maxsize=32)
def temperley_graph(g: PlanarGraph) -> TemperleyGraph:
    """Build ``G_D`` for the patch ``g``."""
    positions = {v: complex(*g.position(v)) for v in g.vertices}
    edges = [e for e in g.undirected_edges() if not (e[0] in g.boundary and e[1] in g.boundary)]
    if len(edges) != len(g.undirected_edges()):
        raise GeometryError("Edges between two boundary vertices are not supported")
    neighbours: Dict[Node, set] = {v: set(g.neighbors(v)) for v in g.vertices}
    ring_edges = _ring(g)
    for a, b in ring_edges:
        neighbours[a].add(b)
        neighbours[b].add(a)
    rotation = {
        v: sorted(ns, key=lambda u: math.atan2((positions[u] - positions[v]).imag,
                                               (positions[u] - positions[v]).real))
        for v, ns in neighbours.items()
    }
    traced, left = _trace_faces(rotation, positions)
    keep = [i for i, cycle in enumerate(traced) if _area(cycle, positions) > 0]
    renumber = {old: new for new, old in enumerate(keep)}
    faces = tuple(traced[i] for i in keep)
    left_face = {he: renumber[f] for he, f in left.items() if f in renumber}
    on_ring = set(ring_edges)
    cut: Dict[int, Tuple[Node, Node]] = {}
    for i, cycle in enumerate(faces):
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            if (a, b) in on_ring and i not in cut:
                cut[i] = (a, b)
    if not cut:
        raise GeometryError("No face lies along the boundary ring")

    def interior_edges(i: int) -> int:
        cycle = faces[i]
        return sum(1 for a, b in zip(cycle, cycle[1:] + cycle[:1])
                   if a not in g.boundary or b not in g.boundary)

    # fewest interior edges first: a corner triangle of a square patch
    root = min(cut, key=lambda i: (interior_edges(i), sorted(map(_sort_key, faces[i]))))
    ordered = [a for a, _ in ring_edges]
    start = ordered.index(cut[root][1])
    ring = tuple(ordered[start:] + ordered[:start])
    adjacency: Dict[DNode, List[DNode]] = {}
    for a, b in edges:
        mid: DNode = ("e", (a, b))
        ends: List[DNode] = [("v", x) for x in (a, b) if x not in g.boundary]
        ends += [("f", f) for f in (left_face[(a, b)], left_face[(b, a)]) if f != root]
        adjacency[mid] = ends
        for end in ends:
            adjacency.setdefault(end, []).append(mid)
    return TemperleyGraph(
        graph=g,
        faces=faces,
        left_face=left_face,
        root_face=root,
        ring=ring,
        edges=tuple(edges),
        adjacency={k: tuple(v) for k, v in adjacency.items()},
    )


def temperley_dimers(t: WiredTree, tg: Optional[TemperleyGraph] = None) -> DimerMatching:
    """Perfect matching of ``G_D`` encoding the tree ``t`` and its dual."""
    g = t.graph
    tg = tg or temperley_graph(g)
    matching = set()
    tree_edges = set()
    for v in g.interior:
        e = _edge_key(v, t.parent[v])
        tree_edges.add(e)
        matching.add((("e", e), ("v", v)))
    dual: Dict[int, List[Tuple[int, Tuple[Node, Node]]]] = {}
    for a, b in tg.edges:
        if (a, b) in tree_edges:
            continue
        f, h = tg.face_of(a, b), tg.face_of(b, a)
        dual.setdefault(f, []).append((h, (a, b)))
        dual.setdefault(h, []).append((f, (a, b)))
    seen = {tg.root_face}
    queue = deque([tg.root_face])
    while queue:
        f = queue.popleft()
        for h, e in dual.get(f, []):
            if h not in seen:
                seen.add(h)
                matching.add((("e", e), ("f", h)))
                queue.append(h)
    if len(seen) != len(tg.faces):
        raise MatchingError("Complement of the tree does not span the dual graph")
    if len(matching) * 2 != len(tg.adjacency):
        raise MatchingError("Tree does not give a perfect matching of G_D")
    return frozenset(matching)


def tree_from_dimers(matching: DimerMatching, g: PlanarGraph) -> WiredTree:
    """Inverse of :func:`temperley_dimers`."""
    parent = {}
    for (_, edge), (kind, node) in matching:
        if kind == "v":
            a, b = edge  # type: ignore[misc]
            parent[node] = b if a == node else a
    return _checked_tree(g, parent)


def enumerate_matchings(tg: TemperleyGraph, cap: int = 100_000) -> List[DimerMatching]:
    """Every perfect matching of ``G_D``."""
    whites = tg.whites
    used: set = set()
    current: List[Tuple[DNode, DNode]] = []
    found: List[DimerMatching] = []

    def extend(i: int) -> None:
        if i == len(whites):
            found.append(frozenset(current))
            if len(found) > cap:
                raise MatchingError(f"More than {cap} matchings")
            return
        w = whites[i]
        for b in tg.adjacency[w]:
            if b not in used:
                used.add(b)
                current.append((w, b))
                extend(i + 1)
                current.pop()
                used.discard(b)

    if len(whites) == len(tg.adjacency) - len(whites):
        extend(0)
    return found


# ---------------------------------------------------------------------------
# Heights on the faces of G_D
# ---------------------------------------------------------------------------

Corner = Tuple[Node, int]


def _corner_cycle(tg: TemperleyGraph, corner: Corner) -> Tuple[Node, Node]:
    v, f = corner
    cycle = tg.faces[f]
    i = cycle.index(v)
    return cycle[i - 1], cycle[(i + 1) % len(cycle)]


def corner_heights(matching: DimerMatching, tg: TemperleyGraph,
                   pin: Optional[Corner] = None) -> Dict[Corner, Fraction]:
    """Dimer height on the bulk faces of ``G_D``.

    Faces of ``G_D`` are corners ``(v, f)`` of ``G``. The height changes by
    ``1 - 1/4`` across a matched and by ``-1/4`` across an unmatched edge when
    its white end is on the right, and by the negatives otherwise. Only
    corners whose four ``G_D`` vertices all have degree four are used.
    """
    g = tg.graph
    matched = set(matching)
    degree = {n: len(ns) for n, ns in tg.adjacency.items()}

    def full(node: DNode) -> bool:
        return degree.get(node, 0) == 4

    corners = {}
    for f, cycle in enumerate(tg.faces):
        if f == tg.root_face:
            continue
        for v in cycle:
            if v in g.boundary:
                continue
            prev, nxt = _corner_cycle(tg, (v, f))
            nodes = (("v", v), ("f", f), ("e", _edge_key(prev, v)), ("e", _edge_key(v, nxt)))
            if all(full(n) for n in nodes):
                corners[(v, f)] = nodes
    if not corners:
        raise GeometryError("Graph has no bulk faces")

    def centre(corner: Corner) -> complex:
        return sum(tg.position(n) for n in corners[corner]) / 4

    def crossings(corner: Corner):
        v, f = corner
        prev, nxt = _corner_cycle(tg, corner)
        for u in (prev, nxt):
            e = _edge_key(v, u)
            other = tg.face_of(u, v) if tg.face_of(v, u) == f else tg.face_of(v, u)
            yield (v, other), ("v", v), ("e", e)
            yield (u, f), ("f", f), ("e", e)

    pin = min(corners, key=lambda c: (_sort_key(c[0]), c[1])) if pin is None else pin
    heights = {pin: Fraction(0)}
    queue = deque([pin])
    while queue:
        c = queue.popleft()
        for nxt, black, white in crossings(c):
            if nxt not in corners:
                continue
            d = centre(nxt) - centre(c)
            r = tg.position(white) - tg.position(black)
            right = (d.conjugate() * r).imag < 0
            value = (1 if (white, black) in matched else 0) - QUARTER
            step = value if right else -value
            if nxt not in heights:
                heights[nxt] = heights[c] + step
                queue.append(nxt)
            elif heights[nxt] != heights[c] + step:
                raise MatchingError(f"Height is not consistent at corner {nxt}")
    return heights


def left_corner(t: WiredTree, tg: TemperleyGraph, v: Node) -> Corner:
    """Face of ``G_D`` on the left of the tree edge leaving ``v``."""
    return (v, tg.face_of(v, t.parent[v]))


def _points(g: PlanarGraph, path: Sequence[Node]) -> List[complex]:
    return [complex(*g.position(u)) for u in path]


def _representative(t: WiredTree, v: Node, meet: Node) -> List[complex]:
    branch = t.branch(v)
    return _points(t.graph, list(branch[: branch.index(meet) + 1]) + [t.parent[meet]])


def _ring_closure(t: WiredTree, tg: TemperleyGraph, v: Node) -> List[complex]:
    """Branch of ``v`` continued counterclockwise along the ring up to the root face.

    Every closure ends with the same half ring edge, from the last ring
    vertex towards the middle of the root face's ring edge.
    """
    branch = t.branch(v)
    ring = tg.ring
    try:
        arc = ring[ring.index(branch[-1]):]
    except ValueError:
        raise GeometryError(f"Branch of {v} ends off the ring") from None
    points = _points(t.graph, list(branch) + list(arc[1:]))
    end = (complex(*t.graph.position(ring[-1])) + complex(*t.graph.position(ring[0]))) / 2
    return points + [end]


def height_from_winding(t: WiredTree, x: Node, y: Node,
                        tg: Optional[TemperleyGraph] = None) -> Fraction:
    """Height difference between the faces left of the tree edges at ``x`` and ``y``.

    Computed as ``(W(gx) - W(gy)) / 2pi`` with ``W`` the intrinsic winding.
    When the branches of ``x`` and ``y`` share an interior vertex, ``gx``
    follows the branch of ``x`` to the first such vertex and then one more
    tree edge, and ``gy`` likewise. Otherwise the branches only meet through
    the wired boundary and each is closed by :func:`_ring_closure`. On
    square-lattice patches the result equals the :func:`corner_heights`
    difference wherever both faces are bulk faces.
    """
    g = t.graph
    if x in g.boundary or y in g.boundary:
        raise GeometryError("Endpoints must be interior vertices")
    on_y = set(t.branch(y))
    meet = next((u for u in t.branch(x) if u in on_y), None)
    if meet is None or meet in g.boundary:
        tg = tg or temperley_graph(g)
        gx, gy = _ring_closure(t, tg, x), _ring_closure(t, tg, y)
    else:
        gx, gy = _representative(t, x, meet), _representative(t, y, meet)
    value = (winding_intrinsic(gx) - winding_intrinsic(gy)) / (2 * math.pi)
    return Fraction(value).limit_denominator(360)
