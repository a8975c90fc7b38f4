"""Topological and intrinsic winding of planar polylines.

Points may be given as complex numbers or as ``(x, y)`` pairs. Angles are
in radians.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable, Sequence, Union

import numpy as np

from lozenge_lab.errors import GeometryError

PointLike = Union[complex, Sequence[float]]

EPS = 1e-12


def as_complex(points: Iterable[PointLike]) -> np.ndarray:
    values = []
    for p in points:
        if isinstance(p, (complex, float, int, np.number)):
            values.append(complex(p))
        else:
            values.append(complex(p[0], p[1]))
    return np.asarray(values, dtype=complex)


def _distance_to_segments(z: complex, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    length2 = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(length2 > 0, ((z - a) * np.conj(d)).real / length2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.abs(a + t * d - z)


def winding_topological(p: Iterable[PointLike], z: PointLike) -> float:
    """Total change of ``arg(p(t) - z)`` along the polyline.

    When ``z`` is the first or the last point, the limit from the inside of
    the curve is used: the segment ending at ``z`` contributes nothing.
    """
    pts = as_complex(p)
    zc = as_complex([z])[0]
    if len(pts) < 2:
        return 0.0
    a, b = pts[:-1], pts[1:]
    skip = np.zeros(len(a), dtype=bool)
    if abs(pts[0] - zc) < EPS:
        skip[0] = True
    if abs(pts[-1] - zc) < EPS:
        skip[-1] = True
    if np.any(_distance_to_segments(zc, a[~skip], b[~skip]) < EPS):
        raise GeometryError("Point lies on the curve away from its endpoints")
    angles = np.angle((b[~skip] - zc) / (a[~skip] - zc))
    return float(angles.sum())


def _orient(a: complex, b: complex, c: complex) -> float:
    return ((b - a).conjugate() * (c - a)).imag


def _segments_cross(a: complex, b: complex, c: complex, d: complex) -> bool:
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if (o1 * o2 < 0) and (o3 * o4 < 0):
        return True

    def on_segment(p: complex, q: complex, r: complex, o: float) -> bool:
        return abs(o) < EPS and min(p.real, q.real) - EPS <= r.real <= max(p.real, q.real) + EPS \
            and min(p.imag, q.imag) - EPS <= r.imag <= max(p.imag, q.imag) + EPS

    return on_segment(a, b, c, o1) or on_segment(a, b, d, o2) \
        or on_segment(c, d, a, o3) or on_segment(c, d, b, o4)


def is_simple(p: Iterable[PointLike]) -> bool:
    """Whether the polyline has no self-intersection besides consecutive joints."""
    pts = as_complex(p)
    n = len(pts) - 1
    if n < 1:
        return True
    rounded = {(round(z.real, 9), round(z.imag, 9)) for z in pts}
    if len(rounded) != len(pts):
        return False
    lengths = np.abs(np.diff(pts))
    cell = float(np.median(lengths)) or 1.0
    buckets = defaultdict(list)
    for i in range(n):
        a, b = pts[i], pts[i + 1]
        for gx in range(math.floor(min(a.real, b.real) / cell), math.floor(max(a.real, b.real) / cell) + 1):
            for gy in range(math.floor(min(a.imag, b.imag) / cell), math.floor(max(a.imag, b.imag) / cell) + 1):
                buckets[(gx, gy)].append(i)
    checked = set()
    for members in buckets.values():
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                i, j = members[x], members[y]
                if abs(i - j) <= 1 or (i, j) in checked:
                    continue
                checked.add((i, j))
                if _segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]):
                    return False
    return True


def winding_intrinsic(p: Iterable[PointLike]) -> float:
    """Sum of the signed turning angles, each in ``(-pi, pi)``, of a simple polyline."""
    pts = as_complex(p)
    if len(pts) < 3:
        return 0.0
    steps = np.diff(pts)
    if np.any(np.abs(steps) < EPS):
        raise GeometryError("Polyline has a repeated consecutive point")
    if not is_simple(pts):
        raise GeometryError("Polyline is not simple")
    turns = np.angle(steps[1:] / steps[:-1])
    if np.any(np.abs(np.abs(turns) - math.pi) < 1e-9):
        raise GeometryError("Polyline reverses direction")
    return float(turns.sum())
