"""Reproducible random streams keyed on (master seed, task key)."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def derive_seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    """Return the seed sequence for ``key`` under the master ``seed``.

    Keys must be non-negative integers; the same (seed, key) always maps to the
    same stream and distinct keys give independent streams.
    """
    entropy: Sequence[int] = (int(seed), *(int(k) for k in key))
    if any(value < 0 for value in entropy):
        raise ValueError(f"Seed and keys must be non-negative, got {entropy}")
    return np.random.SeedSequence(list(entropy))


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Return a private ``Generator`` for ``key`` under ``seed``."""
    return np.random.default_rng(derive_seed_sequence(seed, *key))
