# tests/conftest.py

import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.core.models import SweepGrid  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-grid regression sweeps (deselect with -m 'not slow')")


@pytest.fixture
def coarse_grid():
    """0..650 ns in 10 ns steps, the full theta range."""
    return SweepGrid(0.0, 650.0, 10.0, 0.0, 179.0, 1.0)


@pytest.fixture
def fine_grid():
    return SweepGrid(0.0, 650.0, 1.0, 0.0, 179.0, 1.0)
