import pytest

from polylog_rh import rh_engine

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def pure_run():
    """Pure-recursive reconstruction to k = 5 on the default contours."""
    levels: list = []
    reports = rh_engine.reconstruct_all(5, mode="pure-recursive", levels_out=levels)
    return reports, levels
