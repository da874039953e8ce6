import os
import sys

# Ensure project root is on sys.path so tests can import app.py and cli.py
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import pytest

from utils import scalars
from utils.resonance import analyze
from utils.vector_spec import SQRT2, SQRT3, resolve_vector

SPECS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "specs"))


@pytest.fixture
def sqrt2():
    return scalars.scalar(SQRT2)


@pytest.fixture
def sqrt2_flow():
    """(1, √2): d = 2, Λ = Z²."""
    return analyze([scalars.rational(1), scalars.scalar(SQRT2)])


@pytest.fixture
def resonant_flow():
    """(1, √2, 1+√2): one integer relation, d = 2."""
    s = scalars.scalar(SQRT2)
    return analyze([scalars.rational(1), s, s + 1])


@pytest.fixture
def half_flow():
    """(1, 1/2): periodic, d = 1."""
    return analyze(scalars.rational_vector([1, "1/2"]))


@pytest.fixture
def three_flow():
    """(1, √2, √3): d = 3."""
    return analyze([scalars.rational(1), scalars.scalar(SQRT2), scalars.scalar(SQRT3)])


@pytest.fixture
def specs_dir():
    return SPECS_DIR


@pytest.fixture
def cbrt2_flow():
    """(1, ∛2, ∛4): d = 3."""
    return analyze(resolve_vector("cbrt2").vector())
