"""Uniform and conditional sampling of lozenge tilings.

Tilings are handled through their height functions. A move picks a face
and a direction and raises or lowers that face's height by 3 when the
result is still a height function; this chain is monotone for the pointwise
order, so coupling from the past from the minimal and maximal heights gives
exact samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import stats

from lozenge_lab.dimers.hexlattice import (
    MATCHED_STEP,
    UNMATCHED_STEP,
    DimerConfig,
    Edge,
    HeightField,
    HexDomain,
    height_field,
    triangle_point,
    face_point,
)
from lozenge_lab.errors import ConditioningError, DomainError, LabError, UntileableDomainError
from lozenge_lab.utils.logger import get_logger

logger = get_logger(__name__)

Heights = List[int]


@dataclass(frozen=True)
class ConditionalSpec:
    """Law of a uniform tiling agreeing with ``m`` on every edge outside ``B(0, R)``."""

    R: float
    m: DimerConfig

    @property
    def frozen_edges(self) -> FrozenSet[Edge]:
        """Matched edges of ``m`` with both endpoints outside the open ball."""
        ox, oy = face_point(self.m.domain.origin)
        frozen = set()
        for edge in self.m.edges:
            if all(
                math.hypot(x - ox, y - oy) >= self.R
                for x, y in map(triangle_point, edge)
            ):
                frozen.add(edge)
        return frozenset(frozen)


class HeightLattice:
    """Height functions of a domain, optionally with some edges frozen.

    Heights are lists indexed like ``domain.faces``. Every link between
    neighbouring faces carries the allowed range of ``h(q) - h(p)``; frozen
    and boundary links allow a single value.
    """

    def __init__(self, domain: HexDomain,
                 frozen: Optional[FrozenSet[Edge]] = None) -> None:
        self.domain = domain
        self.frozen = frozen or frozenset()
        self.pin = domain.face_index[domain.pin]
        covered = {v for edge in self.frozen for v in edge}
        n = len(domain.faces)
        # links[i]: (j, low, high) with low <= h[j] - h[i] <= high
        self.links: List[List[Tuple[int, int, int]]] = [[] for _ in range(n)]
        self.matchable: List[Tuple[int, int, int, Edge]] = []
        for p, k, q, edge, kind in domain.face_links:
            i, j = domain.face_index[p], domain.face_index[q]
            if kind == 2 and edge in self.frozen:
                low = high = MATCHED_STEP[k]
            elif kind == 1 or edge[0] in covered or edge[1] in covered:
                low = high = UNMATCHED_STEP[k]
            else:
                low, high = sorted((UNMATCHED_STEP[k], MATCHED_STEP[k]))
            if high == MATCHED_STEP[k] or low == MATCHED_STEP[k]:
                self.matchable.append((i, j, MATCHED_STEP[k], edge))
            self.links[i].append((j, low, high))
            self.links[j].append((i, -high, -low))
        self.mobile: List[int] = [
            i for i in range(n)
            if len(self.links[i]) == 6 and all(lo != hi for _, lo, hi in self.links[i])
        ]

    def extremes(self) -> Tuple[Heights, Heights]:
        """Pointwise minimal and maximal height functions."""
        upper_graph = nx.DiGraph()
        lower_graph = nx.DiGraph()
        upper_graph.add_nodes_from(range(len(self.links)))
        lower_graph.add_nodes_from(range(len(self.links)))
        for i, links in enumerate(self.links):
            for j, low, high in links:
                upper_graph.add_edge(i, j, weight=high)
                lower_graph.add_edge(i, j, weight=-low)
        try:
            upper = nx.single_source_bellman_ford_path_length(upper_graph, self.pin)
            lower = nx.single_source_bellman_ford_path_length(lower_graph, self.pin)
        except nx.NetworkXUnbounded as exc:
            if self.frozen:
                raise ConditioningError("Frozen edges admit no completion") from exc
            raise UntileableDomainError("Domain admits no lozenge tiling") from exc
        n = len(self.links)
        if len(upper) != n or len(lower) != n:
            raise DomainError("Face graph of the domain is disconnected")
        hmax = [int(upper[i]) for i in range(n)]
        hmin = [-int(lower[i]) for i in range(n)]
        if any(a > b for a, b in zip(hmin, hmax)):
            raise ConditioningError("Height constraints are infeasible")
        return hmin, hmax

    def update(self, h: Heights, site: int, raise_: bool) -> bool:
        """Try to move ``h[site]`` by +3 (``raise_``) or -3; return whether it moved."""
        value = h[site]
        if raise_:
            bound = min(h[j] - low for j, low, _ in self.links[site])
            if value + 3 <= bound:
                h[site] = value + 3
                return True
        else:
            bound = max(h[j] - high for j, _, high in self.links[site])
            if value - 3 >= bound:
                h[site] = value - 3
                return True
        return False

    def to_config(self, h: Heights) -> DimerConfig:
        edges = frozenset(
            edge for i, j, matched, edge in self.matchable if h[j] - h[i] == matched
        )
        return DimerConfig(self.domain, edges)

    def from_config(self, m: DimerConfig) -> Heights:
        field = height_field(m)
        return [field.values[f] for f in self.domain.faces]


def extremal_heights(domain: HexDomain) -> Tuple[HeightField, HeightField]:
    """Minimal and maximal height functions pinned at ``domain.pin``."""
    hmin, hmax = HeightLattice(domain).extremes()
    faces = domain.faces
    return (
        HeightField(dict(zip(faces, hmin)), domain.pin, domain),
        HeightField(dict(zip(faces, hmax)), domain.pin, domain),
    )


def glauber_step(m: DimerConfig, rng: np.random.Generator) -> DimerConfig:
    """One step of the flip chain: uniform interior face, fair-coin direction."""
    domain = m.domain
    interior = domain.interior_faces
    if not interior:
        return m
    face = interior[int(rng.integers(len(interior)))]
    raise_ = bool(rng.random() < 0.5)
    lattice = HeightLattice(domain)
    h = lattice.from_config(m)
    if lattice.update(h, domain.face_index[face], raise_):
        return lattice.to_config(h)
    return m


def run_glauber(m: DimerConfig, steps: int, rng: np.random.Generator) -> DimerConfig:
    """``steps`` flip-chain steps from ``m``."""
    domain = m.domain
    lattice = HeightLattice(domain)
    h = lattice.from_config(m)
    sites = [domain.face_index[f] for f in domain.interior_faces]
    if not sites:
        return m
    choices = rng.integers(len(sites), size=steps)
    coins = rng.random(steps) < 0.5
    for c, coin in zip(choices, coins):
        lattice.update(h, sites[int(c)], bool(coin))
    return lattice.to_config(h)


def cftp_heights(lattice: HeightLattice, rng: np.random.Generator,
                 max_epochs: int = 48) -> Heights:
    """Exact sample from the uniform law on the lattice's height functions.

    Epoch ``e`` runs the chain over times ``-2**e .. -1``; the updates for
    already visited times are reused, fresh ones are drawn only for the newly
    prepended stretch.
    """
    lower0, upper0 = lattice.extremes()
    sites = lattice.mobile
    if lower0 == upper0 or not sites:
        return upper0
    blocks: List[Tuple[np.ndarray, np.ndarray]] = []
    horizon = 0
    for epoch in range(max_epochs):
        length = 1 if horizon == 0 else horizon
        blocks.append((rng.integers(len(sites), size=length), rng.random(length) < 0.5))
        horizon += length
        lower, upper = list(lower0), list(upper0)
        for choices, coins in reversed(blocks):
            for c, coin in zip(choices.tolist(), coins.tolist()):
                site = sites[c]
                lattice.update(lower, site, coin)
                lattice.update(upper, site, coin)
        if lower == upper:
            logger.debug(f"CFTP coalesced after {epoch + 1} epochs (T={horizon})")
            return upper
    raise LabError(f"CFTP did not coalesce within {max_epochs} epochs")


def cftp(domain: HexDomain, rng: np.random.Generator) -> DimerConfig:
    """Uniform random tiling of ``domain``."""
    lattice = HeightLattice(domain)
    return lattice.to_config(cftp_heights(lattice, rng))


def conditional_sample(spec: ConditionalSpec, rng: np.random.Generator) -> DimerConfig:
    """Uniform tiling of ``spec.m.domain`` agreeing with ``spec.m`` on every frozen edge."""
    lattice = HeightLattice(spec.m.domain, spec.frozen_edges)
    return lattice.to_config(cftp_heights(lattice, rng))


def conditional_origin_heights(spec: ConditionalSpec, n: int,
                               rng: np.random.Generator) -> np.ndarray:
    """``n`` independent draws of ``h(0)`` under ``spec``, in cube units."""
    domain = spec.m.domain
    lattice = HeightLattice(domain, spec.frozen_edges)
    origin = domain.face_index[domain.origin]
    return np.array(
        [cftp_heights(lattice, rng)[origin] / 3.0 for _ in range(n)], dtype=float
    )


def best_window(values: Sequence[float], width: float = 1.0,
                step: float = 0.5) -> Tuple[float, float]:
    """Window ``(x, x + width)`` holding the largest fraction of ``values``.

    ``x`` runs over the grid ``step * Z`` covering the values; ties go to
    the smallest ``x``. Returns ``(x, fraction)``.
    """
    data = np.sort(np.asarray(values, dtype=float))
    if data.size == 0:
        raise ValueError("No values to scan")
    start = math.floor(data[0] / step) * step - width
    grid = np.arange(start, data[-1] + step, step)
    inside = np.searchsorted(data, grid + width, side="left") - np.searchsorted(
        data, grid, side="right"
    )
    best = int(np.argmax(inside))
    return float(grid[best]), float(inside[best] / data.size)


def max_window_mass(values: Sequence[float], width: float = 1.0,
                    step: float = 0.5) -> float:
    """Largest fraction of ``values`` inside an open window ``(x, x + width)``."""
    return best_window(values, width, step)[1]


@dataclass(frozen=True)
class SpreadOutEstimate:
    x_window: float
    estimate: float
    half_width: float
    values: Tuple[float, ...]

    @property
    def ci_low(self) -> float:
        return max(0.0, self.estimate - self.half_width)

    @property
    def ci_high(self) -> float:
        return min(1.0, self.estimate + self.half_width)


def spread_out_statistic(spec: ConditionalSpec, samples: int, rng: np.random.Generator,
                         confidence: float = 0.95) -> SpreadOutEstimate:
    """Estimate ``max_x P(h(0) in (x, x+1))`` under the conditional law of ``spec``.

    Draws ``samples`` exact conditional tilings; ``half_width`` is the normal
    approximation of the binomial confidence interval at the maximising window.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    values = conditional_origin_heights(spec, samples, rng)
    x, p = best_window(values)
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    return SpreadOutEstimate(
        x_window=x,
        estimate=p,
        half_width=float(z * math.sqrt(p * (1.0 - p) / samples)),
        values=tuple(float(v) for v in values),
    )


def tilings_to_json(samples: Sequence[DimerConfig]) -> List[List[int]]:
    """Tilings as sorted lists of indices into ``domain.edges``."""
    return [m.indices() for m in samples]


def spread_out_rows(R: float, estimates: Sequence[SpreadOutEstimate]) -> List[Dict[str, float]]:
    """CSV rows ``R, x_window, prob, ci_halfwidth``, one per estimate."""
    return [
        {"R": R, "x_window": est.x_window, "prob": est.estimate, "ci_halfwidth": est.half_width}
        for est in estimates
    ]
