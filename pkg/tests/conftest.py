import numpy as np
import pytest

from boson_owf import haar_random_unitary


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture(scope="session")
def u26():
    return haar_random_unitary(26, 1)


@pytest.fixture(scope="session")
def u15():
    return haar_random_unitary(15, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion for the summary table."""

    def record(ok, detail=""):
        ACCEPTANCE[request.node.name] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in sorted(ACCEPTANCE.items(), key=lambda kv: int(kv[0].split("_")[1])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
