"""Experiment configuration."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

from lozenge_lab.errors import ConfigError
from lozenge_lab.scheduling.task_scheduler import resolve_workers
from lozenge_lab.utils.config_manager import DEFAULT_CONFIG_PATH, load_config
from lozenge_lab.utils.logger import default_logger as logger

KINDS = ("sample", "robustness", "spreadout", "winding", "decoupling", "crossing-estimate")
PERTURBATIONS = ("none", "cube", "zigzag", "translation")


def parse_domain(text: str) -> Tuple[int, int, int]:
    """Parse ``"hex:a,b,c"`` into positive side lengths."""
    shape, _, rest = text.partition(":")
    if shape.strip().lower() != "hex" or not rest:
        raise ConfigError(f"Unknown domain {text!r}; expected hex:a,b,c")
    try:
        sides = tuple(int(s) for s in rest.split(","))
    except ValueError as exc:
        raise ConfigError(f"Hexagon sides must be integers: {text!r}") from exc
    if len(sides) != 3 or min(sides) <= 0:
        raise ConfigError(f"A hexagon needs three positive sides: {text!r}")
    return sides


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment run.

    ``sizes`` is the hexagon side schedule of the robustness runs, ``radii``
    the conditioning radius schedule of the spread-out runs and ``meshes``
    the lattice mesh schedule of the tree experiments. ``amplitude`` is the
    largest boundary height discrepancy ``K`` (in cube units) a perturbation
    may introduce. ``domain`` (``"hex:a,b,c"``) picks the hexagon the sample
    runs tile; when empty the regular ``hexagon``-sided one is used.
    """

    kind: str = "robustness"
    seed: int = 0
    workers: int = 1
    samples: int = 1000
    sizes: Tuple[int, ...] = (8, 16, 32)
    perturbation: str = "cube"
    amplitude: float = 3.0
    window_radius: float = 2.0
    hexagon: int = 24
    domain: str = ""
    radii: Tuple[float, ...] = (2.0, 4.0, 8.0)
    inner_samples: int = 1000
    epsilon: float = 0.1
    meshes: Tuple[float, ...] = (2.0 ** -4, 2.0 ** -5, 2.0 ** -6, 2.0 ** -7)
    decoupling_radii: Tuple[float, ...] = (2.0, 4.0, 8.0)
    crossing_scales: Tuple[int, ...] = (64, 128, 256)
    crossing_trials: int = 10_000
    bootstrap: int = 1000
    confidence: float = 0.95
    c0: int = 2
    progress: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"Unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.perturbation not in PERTURBATIONS:
            raise ConfigError(f"Unknown perturbation {self.perturbation!r}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        for name in ("samples", "inner_samples", "crossing_trials", "bootstrap", "workers", "hexagon"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("sizes", "radii", "meshes", "decoupling_radii", "crossing_scales"):
            values = getattr(self, name)
            if not values or any(v <= 0 for v in values):
                raise ConfigError(f"{name} must be a non-empty list of positive values")
        if list(self.radii) != sorted(set(self.radii)):
            raise ConfigError("radii must be strictly increasing")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError("epsilon must lie in (0, 1)")
        if not 0.0 < self.confidence < 1.0:
            raise ConfigError("confidence must lie in (0, 1)")
        if self.window_radius <= 0 or self.amplitude < 0:
            raise ConfigError("window_radius must be positive and amplitude non-negative")
        if self.domain:
            parse_domain(self.domain)

    @property
    def sides(self) -> Tuple[int, int, int]:
        """Side lengths ``(a, b, c)`` of the hexagon the sample runs tile."""
        if self.domain:
            return parse_domain(self.domain)
        return (self.hexagon,) * 3

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """Build a config from a flat mapping; ``settings`` entries are merged in.

        Unknown keys are rejected. ``LOZENGE_LAB_WORKERS`` overrides ``workers``.
        """
        flat: Dict[str, Any] = {k: v for k, v in data.items() if k != "settings"}
        flat.update(data.get("settings") or {})
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(flat) - set(known))
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
        values: Dict[str, Any] = {}
        for name, value in flat.items():
            default = known[name].default
            try:
                if isinstance(default, tuple):
                    values[name] = tuple(type(default[0])(v) for v in value)
                elif isinstance(default, bool):
                    values[name] = bool(value)
                else:
                    values[name] = type(default)(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"Invalid value for {name}: {value!r}") from exc
        values["workers"] = resolve_workers(values.get("workers", cls.workers))
        return cls(**values)

    def replace(self, **changes: Any) -> "ExperimentConfig":
        """Copy with ``changes`` applied; ``None`` values are ignored."""
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}


def load_experiment_config(path: Optional[str] = None,
                           overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Read ``path`` (JSON) and apply ``overrides``.

    A missing or unreadable file falls back to the defaults, as
    :func:`load_config` does.
    """
    data = dict(load_config(path or DEFAULT_CONFIG_PATH))
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    config = ExperimentConfig.from_dict(data)
    if config.kind == "robustness":
        from lozenge_lab.lab.perturbations import check_amplitude

        for n in config.sizes:
            check_amplitude(n, config.perturbation, config.amplitude)
    logger.log(f"Experiment config: kind={config.kind} seed={config.seed} "
               f"workers={config.workers} samples={config.samples}", "debug")
    return config
