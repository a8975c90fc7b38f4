import sys
from pathlib import Path

import pytest

# Ensure the repository root is on sys.path for imports
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from lozenge_lab.dimers.hexlattice import build_hexagon  # noqa: E402
from lozenge_lab.trees.graph import square_patch  # noqa: E402
from lozenge_lab.utils.rng import derive_rng  # noqa: E402


@pytest.fixture
def rng():
    return derive_rng(12345)


@pytest.fixture
def hexagon_222():
    return build_hexagon(2, 2, 2)


@pytest.fixture
def hexagon_333():
    return build_hexagon(3, 3, 3)


@pytest.fixture
def patch_2x2():
    return square_patch(2, 2)


@pytest.fixture(autouse=True)
def _no_workers_env(monkeypatch):
    monkeypatch.delenv("LOZENGE_LAB_WORKERS", raising=False)
