import numpy as np
import pytest

from liiflow.qmat import DensityMatrix, PureState, ket

ACCEPTANCE_LINES: list[str] = []

SQ2 = np.sqrt(2.0)


def bell_vector():
    return (ket("00") + ket("11")) / SQ2


def projector(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@pytest.fixture
def bell():
    return DensityMatrix(projector(bell_vector()), [2, 2])


@pytest.fixture
def product():
    rho_a = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    rho_b = np.array([[0.4, 0.1j], [-0.1j, 0.6]])
    return DensityMatrix(np.kron(rho_a, rho_b), [2, 2])


@pytest.fixture
def classical():
    """1/2 (|00><00| + |11><11|)."""
    return DensityMatrix(np.diag([0.5, 0, 0, 0.5]), [2, 2])


@pytest.fixture
def ghz():
    return PureState((ket("000") + ket("111")) / SQ2, [2, 2, 2])


@pytest.fixture
def w_state():
    return PureState((ket("001") + ket("010") + ket("100")) / np.sqrt(3), [2, 2, 2])


@pytest.fixture
def zero3():
    return PureState(ket("000"), [2, 2, 2])


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
