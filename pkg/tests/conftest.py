from pathlib import Path

import numpy as np
import pytest

from cli.files import load_channel, load_state
from core import units
from core.hypothesis_testing import configure_default_solver

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def _reset_globals():
    """Every test starts in bits with the default solver."""
    units.set_log_base("2")
    configure_default_solver()
    yield
    units.set_log_base("2")
    configure_default_solver()


@pytest.fixture
def fixture_path():
    def _path(name: str) -> str:
        return str(FIXTURES / name)
    return _path


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def noiseless():
    return load_channel(FIXTURES / "noiseless_binary.json")


@pytest.fixture
def identical():
    return load_channel(FIXTURES / "identical_outputs.json")


@pytest.fixture
def zero_plus():
    return load_channel(FIXTURES / "zero_plus.json")


@pytest.fixture
def single_input():
    return load_channel(FIXTURES / "single_input.json")


@pytest.fixture
def plus_state():
    return load_state(FIXTURES / "qubit_plus.json")


@pytest.fixture
def two_thirds_state():
    return load_state(FIXTURES / "qubit_diag_two_thirds.json")
