import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def gen():
    return np.random.default_rng(12345)


def random_posdef(gen, m, floor=0.2):
    a = gen.normal(size=(m, m))
    return a.T @ a + floor * np.eye(m)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
