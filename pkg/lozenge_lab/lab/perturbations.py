"""Bounded perturbations of hexagonal domains."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, List, Tuple

from lozenge_lab.dimers.double_dimer import boundary_discrepancy
from lozenge_lab.dimers.hexlattice import (
    Face,
    HexDomain,
    Vertex,
    build_hexagon,
    is_tileable,
    segment_edge,
)
from lozenge_lab.errors import ConfigError, DomainError, UntileableDomainError
from lozenge_lab.utils.logger import get_logger

logger = get_logger("lab.perturbations")


def hexagon_around(face: Face) -> List[Vertex]:
    """The six triangles sharing the corner ``face``."""
    return sorted({t for k in range(6) for t in segment_edge(face, k)})


def _bottom_faces(domain: HexDomain) -> List[Face]:
    low = min(f[1] for f in domain.faces)
    return sorted(f for f in domain.faces if f[1] == low + 1 and f not in domain.boundary_faces)


def _remove_cubes(domain: HexDomain, centres: Iterable[Face]) -> HexDomain:
    removed = [t for f in centres for t in hexagon_around(f)]
    return domain.remove_triangles(removed)


def cube_defect(domain: HexDomain) -> HexDomain:
    """Remove one elementary hexagon next to the bottom side.

    Candidates are tried from the middle of the side outwards until the
    result is tileable.
    """
    faces = _bottom_faces(domain)
    if not faces:
        raise DomainError("Domain has no face next to its bottom side")
    middle = sum(f[0] for f in faces) / len(faces)
    for face in sorted(faces, key=lambda f: (abs(f[0] - middle), f)):
        try:
            candidate = _remove_cubes(domain, [face])
        except DomainError:
            continue
        if is_tileable(candidate):
            return candidate
    raise UntileableDomainError("No cube defect keeps the domain tileable")


def zigzag(domain: HexDomain) -> HexDomain:
    """Remove every other elementary hexagon along the bottom side.

    A hexagon whose removal would leave an untileable region is skipped.
    """
    faces = _bottom_faces(domain)
    chosen: List[Face] = []
    for face in faces[1:-1:2]:
        try:
            candidate = _remove_cubes(domain, chosen + [face])
        except DomainError:
            continue
        if is_tileable(candidate):
            chosen.append(face)
    if not chosen:
        raise UntileableDomainError("No zigzag perturbation keeps the domain tileable")
    return _remove_cubes(domain, chosen)


def translation(domain: HexDomain) -> HexDomain:
    """The domain shifted by one lattice step, keeping the origin face."""
    return domain.translate(1, 0, keep_origin=True)


def perturb(domain: HexDomain, kind: str) -> HexDomain:
    """Apply the named perturbation (``none``, ``cube``, ``zigzag`` or ``translation``)."""
    if kind == "none":
        return domain
    if kind == "cube":
        return cube_defect(domain)
    if kind == "zigzag":
        return zigzag(domain)
    if kind == "translation":
        return translation(domain)
    raise ConfigError(f"Unknown perturbation {kind!r}")


@lru_cache(maxsize=16)
def domain_pair(n: int, kind: str) -> Tuple[HexDomain, HexDomain]:
    """The ``(n, n, n)`` hexagon and its perturbation."""
    domain = build_hexagon(n, n, n)
    return domain, perturb(domain, kind)


def check_amplitude(n: int, kind: str, amplitude: float) -> float:
    """Boundary discrepancy of the pair for size ``n``; raises above ``amplitude``."""
    domain, perturbed = domain_pair(n, kind)
    if kind == "none":
        return 0.0
    k = boundary_discrepancy(domain, perturbed)
    logger.debug(f"Perturbation {kind} at N={n}: boundary discrepancy {k:.3f}")
    if k > amplitude:
        raise ConfigError(
            f"Perturbation {kind} at N={n} moves boundary heights by {k:.3f} > K={amplitude}"
        )
    return k
