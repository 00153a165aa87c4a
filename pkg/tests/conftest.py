import numpy as np
import pytest

from infobounds.worked_example import example_joint, example_rule

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def J_example():
    return example_joint()


@pytest.fixture
def rule_example():
    return example_rule()


@pytest.fixture
def rng():
    return np.random.default_rng(20190702)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
