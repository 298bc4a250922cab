import numpy as np
import pytest

ACCEPTANCE_LOG = []


def record_criterion(name, passed, detail):
    ACCEPTANCE_LOG.append((name, bool(passed), detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_LOG:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
