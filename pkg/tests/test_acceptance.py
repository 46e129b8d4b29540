"""Acceptance battery at full sample size; one summary line per criterion."""

import pytest

from conecosine.acceptance import CRITERIA, FULL_N, run_criterion

from conftest import ACCEPTANCE_LINES


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    res = run_criterion(number, FULL_N)
    line = res.summary()
    ACCEPTANCE_LINES.append(line)
    print(line)
    failed = [f"{c.label}: {c.detail}" for c in res.checks if not c.passed]
    assert res.passed, "\n".join(failed)
