"""Shared fixtures for the test suite."""

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def reference_tree_text() -> str:
    """A 12-cell mean function over enzyme-style features.

    Used to exercise parsing, routing, and canonical re-rendering on a
    realistically shaped partition (depth 8, splits on parameters and on
    low-fidelity summary coordinates).
    """
    return (DATA_DIR / "mean_function_12cell.txt").read_text(encoding="utf-8")
