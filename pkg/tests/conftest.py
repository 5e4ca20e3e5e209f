import pytest

from dickman.oracle import QuadratureConfig
from dickman.seriesgen import default_tables

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def tables():
    return default_tables()


@pytest.fixture(scope="session")
def cfg():
    """Shared oracle config; its interpolation memo warms up across tests."""
    return QuadratureConfig(tol=1e-10)


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""

    def _report(name, ok, detail):
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
