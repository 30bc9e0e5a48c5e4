import sys
from fractions import Fraction

import pytest

from framegeo.frame import compute
from framegeo.specfile import builtin

F = Fraction


@pytest.fixture(scope="session")
def s7():
    return builtin("kenmotsu-s7")


@pytest.fixture(scope="session")
def warped():
    return builtin("kenmotsu-warped")


@pytest.fixture(scope="session")
def s7_exact(s7):
    """(spec, fd, pack) at (1, 1, 2) in rational mode."""
    fd, pack = compute(s7.frame, (F(1), F(1), F(2)), degree=4, exact=True)
    return s7, fd, pack


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
