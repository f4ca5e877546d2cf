import pytest

from cbop import PrecisionConfig
from cbop.harness import symmetric_pair

# PASS/FAIL lines from test_acceptance, echoed once more at the end of the run
ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def small():
    """Cheap precision for unit tests."""
    return PrecisionConfig(128, 96)


@pytest.fixture(scope="session")
def cfg():
    return PrecisionConfig()


@pytest.fixture(scope="session")
def pair():
    return symmetric_pair()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
