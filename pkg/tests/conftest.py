import numpy as np
import pytest

from mubc.mub import standard_mubs

_RESULTS = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def pauli_trio():
    return standard_mubs(2, 3)


@pytest.fixture(scope="session")
def qutrit_set():
    return standard_mubs(3, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance(request):
    """Record one acceptance line; the test still asserts on its own."""
    results = request.config.stash.setdefault(_RESULTS, [])

    def record(name: str, passed: bool, detail: str) -> bool:
        results.append((name, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in results:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
