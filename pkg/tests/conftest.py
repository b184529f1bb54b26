import numpy as np
import pytest

from chronoq import SystemParameters


def random_params(rng, w_max=1.0, j_max=0.01, omega_max=0.05):
    return SystemParameters(
        w1=rng.uniform(-w_max, w_max),
        w2=rng.uniform(-w_max, w_max),
        j=rng.uniform(-j_max, j_max),
        omega=rng.uniform(0.0, omega_max),
        phi1=rng.uniform(-np.pi, np.pi),
        phi2=rng.uniform(-np.pi, np.pi),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20191)


_ACCEPTANCE_LOG = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LOG


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE_LOG:
        terminalreporter.write_line(f"{'INFO' if ok is None else 'PASS' if ok else 'FAIL'}  {name}: {detail}")
