import numpy as np
import pytest

from msgatesim import calibrate_gate, ideal_gate_choi

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def params():
    return calibrate_gate(2, 60e-6, TWO_PI * 3e6)


@pytest.fixture(scope="session")
def ideal():
    return ideal_gate_choi()
