"""Lozenge tilings as dimer configurations of the hexagonal lattice."""

from .double_dimer import (
    LoopDecomposition,
    boundary_discrepancy,
    build_m_double_prime,
    dd_height,
    m_double_prime_from,
    resample_orientations,
    superimpose,
)
from .hexlattice import (
    DimerConfig,
    HexDomain,
    boundary_curve,
    build_hexagon,
    enumerate_tilings,
    height_field,
    local_window,
)
from .sampler import (
    ConditionalSpec,
    best_window,
    cftp,
    conditional_sample,
    run_glauber,
    spread_out_statistic,
)

__all__ = [
    "LoopDecomposition",
    "boundary_discrepancy",
    "build_m_double_prime",
    "dd_height",
    "m_double_prime_from",
    "resample_orientations",
    "superimpose",
    "DimerConfig",
    "HexDomain",
    "boundary_curve",
    "build_hexagon",
    "enumerate_tilings",
    "height_field",
    "local_window",
    "ConditionalSpec",
    "best_window",
    "cftp",
    "conditional_sample",
    "run_glauber",
    "spread_out_statistic",
]
