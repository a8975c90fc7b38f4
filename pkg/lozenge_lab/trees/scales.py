"""Multi-scale decomposition of a walk around the origin.

Circles ``C_i`` of radius ``e^i`` split a walk into crossing times; scales
whose last crossing is followed by a clean exit are *pre-isolated*, and
those that also wrap around the origin just before and stay away from it
just after are *isolated*. Reference curves, the ``follows`` predicate and
the uniform crossing estimate live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import stats

from lozenge_lab.errors import GeometryError, TraceError
from lozenge_lab.trees.graph import Node, PlanarGraph, Point
from lozenge_lab.trees.winding import as_complex, winding_topological
from lozenge_lab.utils.logger import get_logger

logger = get_logger("scales")

# Generic direction used to move the origin off lattice points and edges.
_NUDGE = complex(0.6180339887, 0.3141592654)


@dataclass(frozen=True)
class CrossingTrace:
    """Crossing times ``tau_k`` and circle indices ``i(k)`` of a walk.

    ``path`` holds the walk positions relative to the origin. Entry ``k = 0``
    is the start with index ``i_min - 1``; the last entry is the end of the
    walk with index ``i_max``.
    """

    i_min: int
    i_max: int
    times: Tuple[int, ...]
    indices: Tuple[int, ...]
    path: np.ndarray = field(repr=False, compare=False)

    @property
    def k_max(self) -> int:
        return len(self.times) - 1

    @property
    def radii(self) -> Dict[int, float]:
        return {i: math.exp(i) for i in range(self.i_min, self.i_max)}

    @property
    def positions(self) -> np.ndarray:
        """The sequence ``S`` of crossing positions."""
        return self.path[list(self.times)]

    def visits(self, j: int) -> List[int]:
        return [k for k, i in enumerate(self.indices) if i == j]

    def kappa(self, i: int) -> Optional[int]:
        """Index of the last crossing of ``C_i``, or None if it is never crossed."""
        ks = self.visits(i)
        return ks[-1] if ks else None

    def piece(self, k: int) -> np.ndarray:
        """Walk positions between ``tau_k`` and ``tau_{k+1}``."""
        if not 0 <= k < self.k_max:
            raise TraceError(f"Piece {k} outside 0..{self.k_max - 1}")
        return self.path[self.times[k]: self.times[k + 1] + 1]


def _as_points(x: Sequence, position: Optional[Callable[[Node], Point]]) -> np.ndarray:
    if position is not None:
        x = [position(v) for v in x]
    return as_complex(x)


def crossing_decomposition(x: Sequence, i_min: int, i_max: int,
                           origin: Point = (0.0, 0.0),
                           position: Optional[Callable[[Node], Point]] = None) -> CrossingTrace:
    """Crossing trace of the walk ``x`` (points, or nodes mapped by ``position``).

    A circle of radius ``r`` is crossed outwards at the first step landing
    at distance ``>= r`` and inwards at the first step landing at ``< r``.
    From ``C_{i_min}`` only the outward crossing counts. The walk must start
    inside ``C_{i_min}`` and end outside ``C_{i_max - 1}``.
    """
    if i_min >= i_max:
        raise TraceError(f"i_min={i_min} must be smaller than i_max={i_max}")
    path = _as_points(x, position) - complex(*origin)
    if len(path) == 0:
        raise TraceError("Walk is empty")
    mods = np.abs(path)
    if mods[0] >= math.exp(i_min):
        raise TraceError("Walk does not start inside the smallest circle")
    if mods[-1] < math.exp(i_max - 1):
        raise TraceError("Walk never leaves the largest circle within its recorded length")
    times, indices = [0], [i_min - 1]
    t, i = 0, i_min - 1
    while True:
        rest = mods[t + 1:]
        outward = np.flatnonzero(rest >= math.exp(i + 1)) if i + 1 < i_max else np.array([], dtype=int)
        inward = np.flatnonzero(rest < math.exp(i - 1)) if i - 1 >= i_min else np.array([], dtype=int)
        t_out = int(outward[0]) if outward.size else None
        t_in = int(inward[0]) if inward.size else None
        if t_out is None and t_in is None:
            times.append(len(path) - 1)
            indices.append(i_max)
            break
        if t_in is None or (t_out is not None and t_out < t_in):
            t, i = t + 1 + t_out, i + 1
        else:
            t, i = t + 1 + t_in, i - 1
        times.append(t)
        indices.append(i)
    return CrossingTrace(i_min, i_max, tuple(times), tuple(indices), path)


def scale_bounds(delta: float, domain_radius: float, c0: int = 2) -> Tuple[int, int]:
    """``(i_min, i_max)`` for mesh ``delta`` in a domain containing ``B(0, domain_radius)``.

    ``i_min = ceil(log delta) + c0``; ``i_max - 1`` is the largest index with
    ``e^i`` at most the radius.
    """
    if delta <= 0 or domain_radius <= 0:
        raise TraceError("Mesh and radius must be positive")
    i_min = math.ceil(math.log(delta)) + c0
    i_max = math.floor(math.log(domain_radius) + 1e-12) + 1
    if i_min >= i_max:
        raise TraceError(f"Mesh {delta} leaves no scale below radius {domain_radius}")
    return i_min, i_max


# ---------------------------------------------------------------------------
# Scale classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleClassification:
    pre_isolated: FrozenSet[int]
    even: FrozenSet[int]
    isolated: FrozenSet[int] = frozenset()
    following: FrozenSet[int] = frozenset()

    def to_json(self) -> Dict[str, List[int]]:
        return {
            "pre_isolated": sorted(self.pre_isolated),
            "even": sorted(self.even),
            "isolated": sorted(self.isolated),
            "following": sorted(self.following),
        }


def classify_scales(tr: CrossingTrace) -> ScaleClassification:
    """Pre-isolated scales: ``kappa_{i-1} = kappa_i - 1 = kappa_{i+1} - 2``."""
    pre = set()
    for i in range(tr.i_min, tr.i_max):
        below, here, above = tr.kappa(i - 1), tr.kappa(i), tr.kappa(i + 1)
        if None in (below, here, above):
            continue
        if below == here - 1 and above == here + 1:
            pre.add(i)
    return ScaleClassification(frozenset(pre), frozenset(i for i in pre if i % 2 == 0))


def separates_origin(points: Iterable, origin: complex = 0j) -> bool:
    """Whether the union of the polyline's edges contains a cycle around ``origin``.

    Vertices are identified by position, so the polyline must only meet
    itself at vertices, as a walk on a plane graph does. Any cycle that
    winds an odd number of times around a point next to the origin shows
    the origin is cut off from infinity; over the cycle space it is enough
    to test a cycle basis.
    """
    pts = as_complex(points)
    if len(pts) < 4:
        return False
    key = [(round(z.real, 9), round(z.imag, 9)) for z in pts]
    graph = nx.Graph()
    for a, b in zip(key, key[1:]):
        if a != b:
            graph.add_edge(a, b)
    steps = np.abs(np.diff(pts))
    scale = float(steps[steps > 0].min()) if np.any(steps > 0) else 1.0
    nudged = origin + _NUDGE * scale * 1e-3
    for cycle in nx.cycle_basis(graph):
        ring = np.array([complex(*v) for v in cycle])
        if _crossing_parity(ring, nudged):
            return True
    return False


def _crossing_parity(ring: np.ndarray, z: complex) -> bool:
    a, b = ring, np.roll(ring, -1)
    straddle = (a.imag > z.imag) != (b.imag > z.imag)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = a.real + (z.imag - a.imag) * (b.real - a.real) / (b.imag - a.imag)
    return bool(np.count_nonzero(straddle & (x_cross > z.real)) % 2)


def _min_distance(points: np.ndarray) -> float:
    if len(points) == 1:
        return float(abs(points[0]))
    a, b = points[:-1], points[1:]
    d = b - a
    length2 = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(length2 > 0, (-a * np.conj(d)).real / length2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return float(np.abs(a + t * d).min())


def isolated_scales(tr: CrossingTrace,
                    classification: Optional[ScaleClassification] = None) -> ScaleClassification:
    """Promote even pre-isolated scales to isolated.

    Scale ``i`` is isolated when the piece ending at its last crossing
    contains a cycle around the origin and the piece after the next crossing
    stays outside ``B(0, e^{i + 6/7})``. Scales whose second piece would
    start at the end of the walk are not isolated.
    """
    classification = classification or classify_scales(tr)
    isolated = set()
    for i in sorted(classification.even):
        k = tr.kappa(i)
        if k is None or k < 1:
            raise TraceError(f"Scale {i} has no piece before its last crossing")
        if k + 2 > tr.k_max:
            continue
        if not separates_origin(tr.piece(k - 1)):
            continue
        if _min_distance(tr.piece(k + 1)) >= math.exp(i + 6 / 7):
            isolated.add(i)
    return ScaleClassification(
        classification.pre_isolated, classification.even, frozenset(isolated),
        classification.following,
    )


def trace_rows(tr: CrossingTrace) -> List[Dict[str, float]]:
    """CSV rows ``k, tau, i, radius`` of a trace."""
    mods = np.abs(tr.positions)
    return [
        {"k": k, "tau": t, "i": i, "radius": float(r)}
        for k, (t, i, r) in enumerate(zip(tr.times, tr.indices, mods))
    ]


# ---------------------------------------------------------------------------
# Reference curves and the follows predicate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaCurves:
    first: np.ndarray
    second: np.ndarray
    winding_gap: float


def _sample(f: Callable[[np.ndarray], np.ndarray], t0: float, t1: float, n: int) -> np.ndarray:
    return f(np.linspace(t0, t1, n))


def gamma_curves(j: int, theta: float, samples: int = 400) -> GammaCurves:
    """The two reference curves from ``e^j`` to ``e^{j + 1 + i theta}``.

    The first goes out radially, turns by ``theta`` counterclockwise and goes
    out again. The second turns clockwise through ``-pi`` and on to ``theta``,
    so it winds once more clockwise around the origin. ``winding_gap`` is the
    numerically computed ``W(second, 0) - W(first, 0)``.
    """
    if not 0.0 <= theta <= math.pi:
        raise GeometryError(f"theta={theta} outside [0, pi]")
    jj = float(j)
    first = np.concatenate([
        _sample(lambda t: np.exp(jj + t / 2), 0, 1, samples),
        _sample(lambda t: np.exp(jj + 0.5 + 1j * theta * (t - 1)), 1, 2, samples)[1:],
        _sample(lambda t: np.exp(jj + 1j * theta + (t - 1) / 2), 2, 3, samples)[1:],
    ])
    second = np.concatenate([
        _sample(lambda t: np.exp(jj + t / 3), 0, 1, samples),
        _sample(lambda t: np.exp(jj + 1 / 3 - 1j * math.pi * (t - 1)), 1, 2, samples)[1:],
        _sample(lambda t: np.exp(jj + (t - 1) / 3 - 1j * math.pi), 2, 3, samples)[1:],
        _sample(lambda t: np.exp(jj + 2 / 3 - 1j * math.pi - 1j * (math.pi - theta) * (t - 3)), 3, 4, samples)[1:],
        _sample(lambda t: np.exp(jj + (t - 2) / 3 + 1j * theta), 4, 5, samples)[1:],
    ])
    gap = winding_topological(second, 0j) - winding_topological(first, 0j)
    return GammaCurves(first, second, gap)


def densify(points: Iterable, spacing: float) -> np.ndarray:
    """Insert evenly spaced points so consecutive points are at most ``spacing`` apart."""
    pts = as_complex(points)
    if len(pts) < 2 or spacing <= 0:
        return pts
    out = [pts[:1]]
    for a, b in zip(pts[:-1], pts[1:]):
        n = max(1, int(math.ceil(abs(b - a) / spacing)))
        out.append(a + (b - a) * np.arange(1, n + 1) / n)
    return np.concatenate(out)


def frechet_distance(p: Iterable, q: Iterable) -> float:
    """Discrete Fréchet distance (Eiter and Mannila), swept by anti-diagonals."""
    a, b = as_complex(p), as_complex(q)
    if len(a) == 0 or len(b) == 0:
        raise GeometryError("Curves must not be empty")
    n, m = len(a), len(b)
    inf = np.full(1, np.inf)
    prev2 = np.full(n, np.inf)
    prev1 = np.full(n, np.inf)
    for s in range(n + m - 1):
        lo, hi = max(0, s - m + 1), min(s, n - 1)
        i = np.arange(lo, hi + 1)
        dist = np.abs(a[i] - b[s - i])
        cur = np.full(n, np.inf)
        if s == 0:
            cur[0] = dist[0]
        else:
            up = np.concatenate([inf, prev1[:-1]])[i]
            left = prev1[i]
            diag = np.concatenate([inf, prev2[:-1]])[i]
            cur[i] = np.maximum(np.minimum(np.minimum(up, left), diag), dist)
        prev2, prev1 = prev1, cur
    return float(prev1[n - 1])


def follows(piece: Iterable, curve: Iterable, j: int,
            spacing: Optional[float] = None) -> bool:
    """Whether ``piece`` stays within ``e^j / 12`` of ``curve`` up to reparametrisation.

    Both polylines are densified to ``spacing`` (default ``e^j / 240``)
    before taking the discrete Fréchet distance.
    """
    spacing = math.exp(j) / 240 if spacing is None else spacing
    return frechet_distance(densify(piece, spacing), densify(curve, spacing)) <= math.exp(j) / 12


def normalised_piece(tr: CrossingTrace, j: int) -> Tuple[np.ndarray, float]:
    """Piece after the last crossing of ``C_j``, rotated to start on the positive axis.

    It is reflected when needed so that its end has argument ``theta`` in
    ``[0, pi]``; returns the piece and ``theta``.
    """
    k = tr.kappa(j)
    if k is None or k >= tr.k_max:
        raise TraceError(f"Scale {j} has no piece after its last crossing")
    piece = tr.piece(k)
    start = piece[0]
    if abs(start) == 0:
        raise TraceError(f"Crossing of scale {j} sits at the origin")
    rotated = piece * (abs(start) / start)
    if np.angle(rotated[-1]) < 0:
        rotated = np.conj(rotated)
    return rotated, float(abs(np.angle(rotated[-1])))


def following_scales(tr: CrossingTrace,
                     classification: Optional[ScaleClassification] = None) -> ScaleClassification:
    """Isolated scales whose piece follows the first reference curve."""
    classification = classification or isolated_scales(tr)
    hits = set()
    for j in classification.isolated:
        if tr.kappa(j) is None or tr.kappa(j) >= tr.k_max:
            continue
        piece, theta = normalised_piece(tr, j)
        if follows(piece, gamma_curves(j, theta).first, j):
            hits.add(j)
    return ScaleClassification(
        classification.pre_isolated, classification.even, classification.isolated, frozenset(hits)
    )


# ---------------------------------------------------------------------------
# Uniform crossing
# ---------------------------------------------------------------------------

# Offsets z of the rectangle, in units of the lattice mesh.
CROSSING_OFFSETS: Tuple[Point, ...] = tuple(
    (a / 3, b / 3) for a in range(3) for b in range(3)
)
ORIENTATIONS = ("left-right", "right-left", "bottom-top", "top-bottom")


@dataclass(frozen=True)
class CrossingCell:
    orientation: str
    offset: Point
    successes: int
    trials: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0


@dataclass(frozen=True)
class CrossingEstimate:
    alpha: float
    low: float
    high: float
    confidence: float
    cells: Tuple[CrossingCell, ...]

    def to_json(self) -> Dict[str, object]:
        return {
            "alpha": self.alpha,
            "ci": [self.low, self.high],
            "confidence": self.confidence,
            "cells": [
                {"orientation": c.orientation, "offset": list(c.offset),
                 "successes": c.successes, "trials": c.trials, "rate": c.rate}
                for c in self.cells
            ],
        }


def clopper_pearson(successes: int, trials: int, confidence: float = 0.99) -> Tuple[float, float]:
    """Exact binomial confidence interval."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    tail = (1.0 - confidence) / 2.0
    low = 0.0 if successes == 0 else float(stats.beta.ppf(tail, successes, trials - successes + 1))
    high = 1.0 if successes == trials else float(stats.beta.ppf(1 - tail, successes + 1, trials - successes))
    return low, high


def _layout(orientation: str, n: float, corner: complex) -> Tuple[complex, complex, complex, complex]:
    """Rectangle corners and start/target centres for one orientation."""
    if orientation in ("left-right", "right-left"):
        lo, hi = corner, corner + complex(3 * n, n)
        a, b = corner + complex(n / 2, n / 2), corner + complex(5 * n / 2, n / 2)
    else:
        lo, hi = corner, corner + complex(n, 3 * n)
        a, b = corner + complex(n / 2, n / 2), corner + complex(n / 2, 5 * n / 2)
    if orientation in ("right-left", "top-bottom"):
        a, b = b, a
    return lo, hi, a, b


def _crossing_cell(g: PlanarGraph, n: float, orientation: str, offset: Point,
                   anchor: Point, trials: int, rng: np.random.Generator) -> CrossingCell:
    corner = complex(*anchor) + complex(*offset)
    lo, hi, start, target = _layout(orientation, n, corner)
    position = {v: complex(*g.position(v)) for v in g.vertices}
    xs = [p.real for p in position.values()]
    ys = [p.imag for p in position.values()]
    if lo.real < min(xs) or lo.imag < min(ys) or hi.real > max(xs) or hi.imag > max(ys):
        raise GeometryError("Crossing rectangle does not fit inside the graph")
    radius = n / 4
    starts = [v for v, p in position.items() if abs(p - start) < radius]
    if not starts:
        raise GeometryError(f"No vertex in the start ball of scale n={n}")
    successes = 0
    for _ in range(trials):
        v = starts[int(rng.integers(len(starts)))]
        while True:
            p = position[v]
            if abs(p - target) < radius:
                successes += 1
                break
            if not (lo.real <= p.real <= hi.real and lo.imag <= p.imag <= hi.imag) or v in g.boundary:
                break
            v = g.step(v, rng)
    return CrossingCell(orientation, offset, successes, trials)


def uniform_crossing_estimate(g: PlanarGraph, n: float, trials: int,
                              rng: Optional[np.random.Generator] = None,
                              anchor: Point = (0.0, 0.0),
                              offsets: Sequence[Point] = CROSSING_OFFSETS,
                              confidence: float = 0.99) -> CrossingEstimate:
    """Smallest empirical probability that a walk from ``n B_1 + z`` hits ``n B_2 + z`` first.

    ``B_1`` and ``B_2`` are the balls of radius ``1/4`` at ``(1/2, 1/2)`` and
    ``(5/2, 1/2)`` in ``R = [0, 3] x [0, 1]``; the walk fails when it leaves
    ``n R + z``. The minimum runs over ``offsets`` and the four orientations
    (both directions, horizontal and vertical rectangles), and the
    Clopper-Pearson interval is that of the minimising cell.
    """
    if trials <= 0:
        raise GeometryError("trials must be positive")
    rng = rng or np.random.default_rng()
    cells = tuple(
        _crossing_cell(g, n, orientation, offset, anchor, trials, rng)
        for orientation in ORIENTATIONS
        for offset in offsets
    )
    worst = min(cells, key=lambda c: c.rate)
    low, high = clopper_pearson(worst.successes, worst.trials, confidence)
    logger.debug(f"Crossing estimate at n={n}: {worst.rate:.4f} ({worst.orientation}, z={worst.offset})")
    return CrossingEstimate(worst.rate, low, high, confidence, cells)
