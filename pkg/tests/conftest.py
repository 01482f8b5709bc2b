import sesscalc
import pytest


@pytest.fixture(scope="session")
def corpus():
    return sesscalc.corpus()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, report_lines

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in report_lines():
            terminalreporter.write_line(line)
