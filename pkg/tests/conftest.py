from fractions import Fraction

import pytest
from hypothesis import strategies as st

from reciprocal_stability import ValuationSpec

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def p2():
    return ValuationSpec.padic(2)


def rationals(max_num=10**6, max_den=10**6, nonzero=False):
    num = st.integers(-max_num, max_num)
    if nonzero:
        num = num.filter(bool)
    return st.builds(Fraction, num, st.integers(1, max_den))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
