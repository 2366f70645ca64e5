"""Pytest configuration and fixtures."""

import os
from pathlib import Path
from unittest.mock import patch

import pytest
import sympy as sp

from am_operators.config import Config
from am_operators.operators import (
    Cell,
    NormalDiagonalModel,
    PhasedTail,
    PositiveDiagonalModel,
    TailDirection,
    TailRule,
)
from am_operators.schemas.base import Multiplicity

DESCRIPTIONS_DIR = Path(__file__).resolve().parents[1] / "config" / "descriptions"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="Rewrite the golden classification reports under tests/golden",
    )


def tail(limit, direction: str, coefficient=1, exponent=1, start_index: int = 1) -> TailRule:
    """``limit +/- coefficient * n**(-exponent)`` for ``n >= start_index``."""
    return TailRule(
        limit=limit,
        direction=TailDirection(direction),
        coefficient=coefficient,
        exponent=exponent,
        start_index=start_index,
    )


def cell(value, multiplicity: int | str = 1) -> Cell:
    return Cell(value=value, multiplicity=Multiplicity.coerce(multiplicity))


@pytest.fixture(autouse=True)
def setup_test_env():
    """Setup test environment."""
    test_env = {
        "AM_LOG_LEVEL": "WARNING",  # Reduce noise in tests
        "AM_DESCRIPTIONS_DIR": str(DESCRIPTIONS_DIR),
    }

    with patch.dict(os.environ, test_env):
        yield


@pytest.fixture
def update_golden(request) -> bool:
    return request.config.getoption("--update-golden")


@pytest.fixture
def config():
    """Configuration with small numerical budgets for fast tests."""
    return Config(
        log_level="WARNING",
        truncation=64,
        paranormal_grid_size=16,
        paranormal_trials=50,
        descriptions_dir=str(DESCRIPTIONS_DIR),
    )


@pytest.fixture
def below_one():
    """diag(1 - 1/n), n >= 1."""
    return PositiveDiagonalModel(tails=(tail(1, "below"),))


@pytest.fixture
def above_one():
    """diag(1 + 1/n), n >= 1."""
    return PositiveDiagonalModel(tails=(tail(1, "above"),))


@pytest.fixture
def reciprocals():
    """diag(1/n): compact and injective."""
    return PositiveDiagonalModel(tails=(tail(0, "above"),))


@pytest.fixture
def normal_blocks():
    """Cells 2i and -2 plus the real tail 1 - 1/n from n = 2."""
    return NormalDiagonalModel(
        cells=(cell(2 * sp.I), cell(-2)),
        tails=(PhasedTail(rule=tail(1, "below", start_index=2)),),
    )
