"""Estimators and tests used by the experiment runners."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Dict, Hashable, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from lozenge_lab.trees.scales import clopper_pearson

__all__ = [
    "Proportion",
    "TVEstimate",
    "TrendResult",
    "SlopeEstimate",
    "clopper_pearson",
    "proportion",
    "tv_windows",
    "trend_test",
    "slope_estimate",
]


@dataclass(frozen=True)
class Proportion:
    estimate: float
    low: float
    high: float
    n: int

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2.0

    def to_json(self) -> Dict[str, float]:
        return {**asdict(self), "half_width": self.half_width}


def proportion(successes: int, n: int, confidence: float = 0.95) -> Proportion:
    """Success rate with its Clopper-Pearson interval."""
    low, high = clopper_pearson(successes, n, confidence)
    return Proportion(successes / n, low, high, n)


@dataclass(frozen=True)
class TVEstimate:
    tv: float
    low: float
    high: float
    n_a: int
    n_b: int

    @property
    def half_width(self) -> float:
        return (self.high - self.low) / 2.0

    def to_json(self) -> Dict[str, float]:
        return {**asdict(self), "half_width": self.half_width}


def _empirical(samples_a: Sequence[Hashable],
               samples_b: Sequence[Hashable]) -> Tuple[np.ndarray, np.ndarray]:
    alphabet: Dict[Hashable, int] = {}
    for s in list(samples_a) + list(samples_b):
        alphabet.setdefault(s, len(alphabet))
    counts_a = np.bincount([alphabet[s] for s in samples_a], minlength=len(alphabet))
    counts_b = np.bincount([alphabet[s] for s in samples_b], minlength=len(alphabet))
    return counts_a / len(samples_a), counts_b / len(samples_b)


def tv_windows(samples_a: Sequence[Hashable], samples_b: Sequence[Hashable],
               resamples: int = 1000, confidence: float = 0.95,
               rng: Optional[np.random.Generator] = None) -> TVEstimate:
    """Plug-in total variation distance between two empirical pattern laws.

    The interval is a percentile bootstrap: each resample redraws both
    count vectors from multinomials with the empirical frequencies.
    """
    if not samples_a or not samples_b:
        raise ValueError("Both sample lists must be non-empty")
    pa, pb = _empirical(samples_a, samples_b)
    tv = 0.5 * float(np.abs(pa - pb).sum())
    rng = rng or np.random.default_rng(0)
    na, nb = len(samples_a), len(samples_b)
    boot_a = rng.multinomial(na, pa, size=resamples) / na
    boot_b = rng.multinomial(nb, pb, size=resamples) / nb
    values = 0.5 * np.abs(boot_a - boot_b).sum(axis=1)
    tail = (1.0 - confidence) / 2.0
    low, high = np.quantile(values, [tail, 1.0 - tail])
    return TVEstimate(tv, float(min(low, tv)), float(max(high, tv)), na, nb)


@dataclass(frozen=True)
class TrendResult:
    """One-sided Mann-Kendall test of a trend across a schedule."""

    alternative: str
    tau: float
    p_value: float
    means: Tuple[float, ...]

    @property
    def monotone(self) -> bool:
        pairs = zip(self.means, self.means[1:])
        if self.alternative == "decreasing":
            return all(b < a for a, b in pairs)
        return all(b > a for a, b in pairs)

    def significant(self, level: float = 0.05) -> bool:
        return self.p_value < level

    def to_json(self) -> Dict[str, object]:
        return {
            "alternative": self.alternative,
            "tau": self.tau,
            "p_value": self.p_value,
            "means": list(self.means),
            "monotone": self.monotone,
        }


def trend_test(groups: Sequence[Sequence[float]], alternative: str = "decreasing") -> TrendResult:
    """Kendall's tau between the schedule index and the per-sample observations.

    ``groups[i]`` holds the observations at the ``i``-th schedule point.
    Ties are handled by the tau-b statistic.
    """
    if alternative not in ("decreasing", "increasing"):
        raise ValueError(f"alternative must be 'decreasing' or 'increasing', got {alternative!r}")
    if len(groups) < 2 or any(len(g) == 0 for g in groups):
        raise ValueError("Need at least two non-empty groups")
    x = np.concatenate([np.full(len(g), i, dtype=float) for i, g in enumerate(groups)])
    y = np.concatenate([np.asarray(g, dtype=float) for g in groups])
    means = tuple(float(np.mean(g)) for g in groups)
    if np.all(y == y[0]):
        return TrendResult(alternative, 0.0, 1.0, means)
    tau, p_value = stats.kendalltau(x, y, alternative="less" if alternative == "decreasing" else "greater")
    if math.isnan(p_value):
        return TrendResult(alternative, 0.0, 1.0, means)
    return TrendResult(alternative, float(tau), float(p_value), means)


@dataclass(frozen=True)
class SlopeEstimate:
    slope: float
    intercept: float
    low: float
    high: float
    n: int

    @property
    def excludes_zero(self) -> bool:
        return self.low > 0 or self.high < 0

    def to_json(self) -> Dict[str, object]:
        return {**asdict(self), "excludes_zero": self.excludes_zero}


def slope_estimate(x: Sequence[float], y: Sequence[float],
                   confidence: float = 0.95) -> SlopeEstimate:
    """Least-squares slope of ``y`` on ``x`` with a t-based interval."""
    xs, ys = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if xs.size < 3 or np.all(xs == xs[0]):
        raise ValueError("Need at least three observations at two distinct x values")
    fit = stats.linregress(xs, ys)
    t = stats.t.ppf(0.5 + confidence / 2.0, xs.size - 2)
    half = float(t * fit.stderr)
    return SlopeEstimate(float(fit.slope), float(fit.intercept),
                         float(fit.slope) - half, float(fit.slope) + half, int(xs.size))


def quantile(values: Sequence[float], q: float) -> float:
    return float(np.quantile(np.asarray(values, dtype=float), q))


def summarize(values: Sequence[float]) -> Dict[str, float]:
    data = np.asarray(values, dtype=float)
    return {
        "n": int(data.size),
        "mean": float(data.mean()),
        "variance": float(data.var(ddof=1)) if data.size > 1 else 0.0,
    }
