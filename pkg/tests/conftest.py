import pytest

from qrabi.kernel_core import ModelParams


@pytest.fixture(scope="session")
def p_main():
    return ModelParams(0.7, 0.4)


@pytest.fixture(scope="session")
def p_judd():
    return ModelParams(0.3, 0.8)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(RESULTS, key=lambda r: int(r.cid)):
        terminalreporter.write_line(r.line())
