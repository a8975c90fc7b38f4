"""Experiment runners.

Every runner splits its work into independent sample tasks keyed on
``(schedule index, sample index)``. Each task draws from its own stream
``derive_rng(seed, ...)`` and results are reduced in task order, so a
report only depends on the configuration and the seed.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from lozenge_lab.dimers.double_dimer import m_double_prime_from, paths_hit_ball, superimpose
from lozenge_lab.dimers.hexlattice import build_hexagon, local_window, lozenge_type
from lozenge_lab.dimers.sampler import ConditionalSpec, cftp, max_window_mass, spread_out_statistic
from lozenge_lab.lab.config import ExperimentConfig
from lozenge_lab.lab.perturbations import check_amplitude, domain_pair
from lozenge_lab.lab.statistics import (
    proportion,
    quantile,
    slope_estimate,
    summarize,
    trend_test,
    tv_windows,
)
from lozenge_lab.scheduling.task_scheduler import TaskScheduler
from lozenge_lab.trees.graph import disk_grid, path_points, square_box
from lozenge_lab.trees.scales import (
    crossing_decomposition,
    following_scales,
    isolated_scales,
    scale_bounds,
    uniform_crossing_estimate,
)
from lozenge_lab.trees.ust import forward_loop_erase, random_walk, subtree_spanning, wilson_ust
from lozenge_lab.trees.winding import winding_topological
from lozenge_lab.utils.logger import default_logger as logger
from lozenge_lab.utils.rng import derive_rng


@dataclass
class Report:
    """Outcome of one experiment run.

    ``rows`` hold one entry per schedule point and go to CSV; ``trends``
    hold the one-sided trend tests; ``invariants`` must all be true for the
    run to count as passed.
    """

    kind: str
    seed: int
    config: Dict[str, Any]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    trends: Dict[str, Any] = field(default_factory=dict)
    invariants: Dict[str, bool] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def ok(self) -> bool:
        return all(self.invariants.values())

    def canonical(self) -> Dict[str, Any]:
        """Report content that depends only on the configuration and the seed."""
        config = {k: v for k, v in self.config.items() if k not in ("workers", "progress")}
        return {
            "kind": self.kind,
            "seed": self.seed,
            "config": config,
            "rows": self.rows,
            "trends": self.trends,
            "invariants": self.invariants,
            "extra": self.extra,
        }

    def to_json(self) -> Dict[str, Any]:
        return {**self.canonical(), "config": self.config, "wall_clock": self.wall_clock, "ok": self.ok}


def _run_tasks(cfg: ExperimentConfig, label: str, tasks: Sequence[Tuple[Callable[..., Any], tuple]]) -> List[Any]:
    scheduler = TaskScheduler(cfg.workers, progress=cfg.progress, label=label)
    for func, args in tasks:
        scheduler.add_task(func, *args)
    return scheduler.run_all()


@lru_cache(maxsize=8)
def _hexagon(side: int):
    return build_hexagon(side, side, side)


@lru_cache(maxsize=8)
def _disk(delta: float):
    return disk_grid(delta, 1.0)


@lru_cache(maxsize=4)
def _box(n: int):
    return square_box(3 * n + 2, 3 * n + 2)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _tiling_sample(sides: Tuple[int, int, int], seed: int, i: int) -> Dict[str, Any]:
    m = cftp(build_hexagon(*sides), derive_rng(seed, 0, i))
    counts = Counter(lozenge_type(e) for e in m.edges)
    return {"edges": m.indices(), "counts": [counts["a"], counts["b"], counts["c"]]}


def run_sample(cfg: ExperimentConfig) -> Report:
    """Exact uniform tilings of the configured ``a, b, c`` hexagon."""
    started = time.perf_counter()
    a, b, c = cfg.sides
    logger.log(f"Sampling {cfg.samples} tilings of the hex:{a},{b},{c} domain")
    results = _run_tasks(cfg, "tilings", [(_tiling_sample, (cfg.sides, cfg.seed, i)) for i in range(cfg.samples)])
    totals = np.sum([r["counts"] for r in results], axis=0)
    report = Report("sample", cfg.seed, cfg.to_dict())
    report.rows = [{"index": i, "a": r["counts"][0], "b": r["counts"][1], "c": r["counts"][2]}
                   for i, r in enumerate(results)]
    report.extra = {
        "tilings": [r["edges"] for r in results],
        "densities": dict(zip("abc", (totals / totals.sum()).tolist())),
    }
    report.invariants = {"lozenge_count": all(sum(r["counts"]) == a * b + b * c + c * a for r in results)}
    report.wall_clock = time.perf_counter() - started
    return report


# ---------------------------------------------------------------------------
# Robustness
# ---------------------------------------------------------------------------


def _robustness_sample(n: int, kind: str, r: float, seed: int, s: int, i: int) -> Dict[str, Any]:
    domain, perturbed = domain_pair(n, kind)
    rng = derive_rng(seed, s, i)
    m, m2 = cftp(domain, rng), cftp(perturbed, rng)
    d = superimpose(m, m2)
    m3 = m_double_prime_from(d)
    path_edges = frozenset().union(*(p.edges() for p in d.paths)) if d.paths else frozenset()
    window = local_window(m, r)
    counts = Counter(lozenge_type(e) for e in window)
    return {
        "hit": paths_hit_ball(d, r),
        "agree": not ((m.edges ^ m3.edges) - path_edges),
        "window": tuple(sorted(window)),
        "window2": tuple(sorted(local_window(m3, r))),
        "counts": (counts["a"], counts["b"], counts["c"]),
    }


def run_robustness(cfg: ExperimentConfig) -> Report:
    """Paths of ``M`` on ``D_N`` and ``M'`` on the perturbed ``D'_N`` versus the window at 0.

    For every size ``N`` reports the probability that a path of the
    superposition meets ``B(0, r)``, the total variation distance between
    the window laws of ``M`` and ``M''`` and the off-path agreement rate of
    ``M`` and ``M''``.
    """
    started = time.perf_counter()
    report = Report("robustness", cfg.seed, cfg.to_dict())
    hits: List[List[int]] = []
    mismatches: List[List[int]] = []
    agreement = True
    for s, n in enumerate(cfg.sizes):
        k = check_amplitude(n, cfg.perturbation, cfg.amplitude)
        logger.log(f"Robustness N={n} ({cfg.perturbation}, K={k:.3f}): {cfg.samples} samples")
        results = _run_tasks(cfg, f"robustness N={n}", [
            (_robustness_sample, (n, cfg.perturbation, cfg.window_radius, cfg.seed, s, i))
            for i in range(cfg.samples)
        ])
        hit = [int(r["hit"]) for r in results]
        agree = [r["agree"] for r in results]
        agreement = agreement and all(agree)
        hits.append(hit)
        mismatches.append([int(r["window"] != r["window2"]) for r in results])
        tv = tv_windows([r["window"] for r in results], [r["window2"] for r in results],
                        resamples=cfg.bootstrap, confidence=cfg.confidence,
                        rng=derive_rng(cfg.seed, s, cfg.samples))
        totals = np.sum([r["counts"] for r in results], axis=0)
        densities = totals / totals.sum() if totals.sum() else np.zeros(3)
        hit_p = proportion(sum(hit), len(hit), cfg.confidence)
        report.rows.append({
            "N": n,
            "K": k,
            "samples": len(results),
            "hit": hit_p.estimate,
            "hit_half_width": hit_p.half_width,
            "tv": tv.tv,
            "tv_low": tv.low,
            "tv_high": tv.high,
            "agreement": sum(agree) / len(agree),
            "p_a": float(densities[0]),
            "p_b": float(densities[1]),
            "p_c": float(densities[2]),
        })
        logger.log(f"Robustness N={n}: hit={hit_p.estimate:.4f} tv={tv.tv:.4f}")
    if len(cfg.sizes) > 1:
        report.trends = {
            "hit": trend_test(hits, "decreasing").to_json(),
            "window_mismatch": trend_test(mismatches, "decreasing").to_json(),
        }
    report.invariants = {"off_path_agreement": agreement}
    report.wall_clock = time.perf_counter() - started
    return report


# ---------------------------------------------------------------------------
# Spread-out
# ---------------------------------------------------------------------------


def _spread_out_sample(side: int, radii: Tuple[float, ...], inner: int,
                       seed: int, o: int) -> List[Dict[str, float]]:
    domain = _hexagon(side)
    m = cftp(domain, derive_rng(seed, 0, o))
    rows = []
    for s, R in enumerate(radii):
        est = spread_out_statistic(ConditionalSpec(R, m), inner, derive_rng(seed, s + 1, o))
        rows.append({"x_window": est.x_window, "prob": est.estimate, "ci_halfwidth": est.half_width})
    return rows


def run_spread_out(cfg: ExperimentConfig) -> Report:
    """Upper ``(1 - epsilon)``-quantile of the conditional window maximum, per radius.

    ``x_window`` and ``ci_halfwidth`` come from the outer sample whose
    estimate is closest to that quantile.
    """
    started = time.perf_counter()
    logger.log(f"Spread-out on the {cfg.hexagon}-hexagon: R={list(cfg.radii)}, "
               f"{cfg.samples} x {cfg.inner_samples} samples")
    results = _run_tasks(cfg, "spread-out", [
        (_spread_out_sample, (cfg.hexagon, cfg.radii, cfg.inner_samples, cfg.seed, o))
        for o in range(cfg.samples)
    ])
    groups = [[r[s]["prob"] for r in results] for s in range(len(cfg.radii))]
    report = Report("spreadout", cfg.seed, cfg.to_dict())
    for s, (R, values) in enumerate(zip(cfg.radii, groups)):
        level = quantile(values, 1.0 - cfg.epsilon)
        chosen = results[int(np.argmin([abs(v - level) for v in values]))][s]
        report.rows.append({
            "R": R,
            "x_window": chosen["x_window"],
            "prob": level,
            "ci_halfwidth": chosen["ci_halfwidth"],
            "samples": len(values),
            "mean": float(np.mean(values)),
        })
    if len(cfg.radii) > 1:
        report.trends = {"window_max": trend_test(groups, "decreasing").to_json()}
    report.invariants = {"probabilities": all(0.0 <= v <= 1.0 for g in groups for v in g)}
    report.wall_clock = time.perf_counter() - started
    return report


# ---------------------------------------------------------------------------
# Winding non-concentration
# ---------------------------------------------------------------------------


def _winding_sample(delta: float, c0: int, seed: int, s: int, i: int) -> Dict[str, Any]:
    g = _disk(delta)
    rng = derive_rng(seed, s, i)
    start = g.nearest_vertex((0.0, 0.0))
    walk = random_walk(g, start, rng)
    branch = forward_loop_erase(walk)
    winding = winding_topological(path_points(g, branch), complex(*g.position(start)))
    i_min, i_max = scale_bounds(delta, 1.0, c0)
    trace = crossing_decomposition(walk, i_min, i_max, position=g.position)
    classes = following_scales(trace, isolated_scales(trace))
    radii = np.abs(trace.positions[1:-1])
    targets = np.exp(np.asarray(trace.indices[1:-1], dtype=float))
    return {
        "winding": winding / (2 * math.pi),
        "scales": i_max - i_min,
        "pre_isolated": len(classes.pre_isolated),
        "even": len(classes.even),
        "isolated": len(classes.isolated),
        "following": len(classes.following),
        "valid": bool(np.all(np.abs(radii - targets) <= 2 * delta)),
    }


def run_nonconcentration(cfg: ExperimentConfig) -> Report:
    """Winding of the tree branch from the centre of the unit disk, per mesh.

    The branch is the loop erasure of a walk from the vertex nearest 0 to
    the wired boundary. Reports the largest mass the law of
    ``W(Y, 0) / 2 pi`` puts on a unit window, its variance and the scale
    counts of the underlying walk, with slopes against the number of scales.
    """
    started = time.perf_counter()
    report = Report("winding", cfg.seed, cfg.to_dict())
    window_max: List[List[float]] = []
    xs: List[float] = []
    spread: List[float] = []
    isolated: List[float] = []
    valid = True
    for s, delta in enumerate(cfg.meshes):
        logger.log(f"Winding at mesh {delta}: {cfg.samples} branches")
        results = _run_tasks(cfg, f"winding delta={delta}", [
            (_winding_sample, (delta, cfg.c0, cfg.seed, s, i)) for i in range(cfg.samples)
        ])
        values = [r["winding"] for r in results]
        scales = results[0]["scales"]
        centre = float(np.mean(values))
        valid = valid and all(r["valid"] for r in results)
        window_max.append([max_window_mass(values)])
        xs.extend([scales] * len(results))
        spread.extend((v - centre) ** 2 for v in values)
        isolated.extend(r["isolated"] for r in results)
        summary = summarize([2 * math.pi * v for v in values])
        report.rows.append({
            "delta": delta,
            "scales": scales,
            "samples": len(results),
            "window_max": window_max[-1][0],
            "winding_variance": summary["variance"],
            "pre_isolated": float(np.mean([r["pre_isolated"] for r in results])),
            "even": float(np.mean([r["even"] for r in results])),
            "isolated": float(np.mean([r["isolated"] for r in results])),
            "following": float(np.mean([r["following"] for r in results])),
        })
    if len(set(xs)) > 1:
        report.trends = {
            "window_max": trend_test(window_max, "decreasing").to_json(),
            "variance_slope": slope_estimate(xs, spread, cfg.confidence).to_json(),
            "isolated_slope": slope_estimate(xs, isolated, cfg.confidence).to_json(),
        }
    report.invariants = {"trace_radii": valid}
    report.wall_clock = time.perf_counter() - started
    return report


# ---------------------------------------------------------------------------
# Tree decoupling
# ---------------------------------------------------------------------------


def _decoupling_sample(delta: float, radius: float, seed: int, s: int, t: int, i: int) -> bool:
    g = _disk(delta)
    outer = [v for v in g.interior if math.hypot(*g.position(v)) >= 0.5]
    tree = wilson_ust(g, order=outer, rng=derive_rng(seed, s, t, i), complete=False)
    return subtree_spanning(tree, outer).distance < 1.0 / radius


def run_decoupling(cfg: ExperimentConfig) -> Report:
    """Probability that the subtree spanned from outside ``B(0, 1/2)`` enters ``B(0, 1/R)``.

    Same event as the subtree from outside ``B(0, R/2)`` meeting ``B(0, 1)``
    after scaling; it should decrease in ``R`` at every mesh.
    """
    started = time.perf_counter()
    report = Report("decoupling", cfg.seed, cfg.to_dict())
    for s, delta in enumerate(cfg.meshes):
        groups = []
        for t, radius in enumerate(cfg.decoupling_radii):
            results = _run_tasks(cfg, f"decoupling delta={delta} R={radius}", [
                (_decoupling_sample, (delta, radius, cfg.seed, s, t, i)) for i in range(cfg.samples)
            ])
            groups.append([int(r) for r in results])
            p = proportion(sum(groups[-1]), len(results), cfg.confidence)
            report.rows.append({"delta": delta, "R": radius, "samples": p.n,
                                "hit": p.estimate, "low": p.low, "high": p.high})
            logger.log(f"Decoupling delta={delta} R={radius}: {p.estimate:.4f}")
        if len(groups) > 1:
            report.trends[f"delta={delta}"] = trend_test(groups, "decreasing").to_json()
    report.invariants = {"probabilities": all(0.0 <= row["hit"] <= 1.0 for row in report.rows)}
    report.wall_clock = time.perf_counter() - started
    return report


# ---------------------------------------------------------------------------
# Uniform crossing
# ---------------------------------------------------------------------------


def _crossing_scale(n: int, trials: int, confidence: float, seed: int, s: int) -> Dict[str, Any]:
    estimate = uniform_crossing_estimate(
        _box(n), n, trials, derive_rng(seed, s), anchor=(0.5, 0.5), confidence=confidence,
    )
    return estimate.to_json()


def run_crossing_estimate(cfg: ExperimentConfig) -> Report:
    """Empirical uniform crossing constant of the square grid at each scale ``n``."""
    started = time.perf_counter()
    report = Report("crossing-estimate", cfg.seed, cfg.to_dict())
    results = _run_tasks(cfg, "crossing", [
        (_crossing_scale, (n, cfg.crossing_trials, 0.99, cfg.seed, s))
        for s, n in enumerate(cfg.crossing_scales)
    ])
    for n, estimate in zip(cfg.crossing_scales, results):
        low, high = estimate["ci"]
        report.rows.append({"n": n, "trials": cfg.crossing_trials, "alpha": estimate["alpha"],
                            "low": low, "high": high})
    alphas = [row["alpha"] for row in report.rows]
    report.extra = {
        "cells": {str(n): e["cells"] for n, e in zip(cfg.crossing_scales, results)},
        "ratio": (max(alphas) / min(alphas)) if min(alphas) > 0 else math.inf,
    }
    report.invariants = {"positive": all(row["low"] > 0 for row in report.rows)}
    report.wall_clock = time.perf_counter() - started
    return report


RUNNERS: Dict[str, Callable[[ExperimentConfig], Report]] = {
    "sample": run_sample,
    "robustness": run_robustness,
    "spreadout": run_spread_out,
    "winding": run_nonconcentration,
    "decoupling": run_decoupling,
    "crossing-estimate": run_crossing_estimate,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Dispatch on ``cfg.kind``."""
    report = RUNNERS[cfg.kind](cfg)
    logger.log(f"{cfg.kind} finished in {report.wall_clock:.1f}s; invariants "
               f"{'held' if report.ok else 'FAILED'}")
    return report
