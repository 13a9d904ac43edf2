import pytest

from ramansim.catgate import bloch_grid

# Filled by test_acceptance; echoed once at the end of the session.
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def grid17():
    pts = bloch_grid()
    assert len(pts) == 17
    return pts


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
