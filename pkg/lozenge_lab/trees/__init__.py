"""Random walks, uniform spanning trees and their windings."""

from .graph import PlanarGraph, disk_grid, square_box, square_patch
from .scales import (
    classify_scales,
    crossing_decomposition,
    follows,
    gamma_curves,
    isolated_scales,
    uniform_crossing_estimate,
)
from .temperley import temperley_dimers, tree_from_dimers
from .ust import WiredTree, loop_erased_walk, mixed_loop_erase, wilson_ust
from .winding import winding_intrinsic, winding_topological

__all__ = [
    "PlanarGraph",
    "disk_grid",
    "square_box",
    "square_patch",
    "classify_scales",
    "crossing_decomposition",
    "follows",
    "gamma_curves",
    "isolated_scales",
    "uniform_crossing_estimate",
    "temperley_dimers",
    "tree_from_dimers",
    "WiredTree",
    "loop_erased_walk",
    "mixed_loop_erase",
    "wilson_ust",
    "winding_intrinsic",
    "winding_topological",
]
