"""Experiment configuration, statistics, runners and rendering."""

from .config import ExperimentConfig, load_experiment_config
from .experiments import RUNNERS, Report, run_experiment
from .perturbations import check_amplitude, perturb
from .render import render_svg
from .statistics import proportion, slope_estimate, trend_test, tv_windows

__all__ = [
    "ExperimentConfig",
    "load_experiment_config",
    "RUNNERS",
    "Report",
    "run_experiment",
    "check_amplitude",
    "perturb",
    "render_svg",
    "proportion",
    "slope_estimate",
    "trend_test",
    "tv_windows",
]
