from fractions import Fraction as F

import pytest

from redform.core import Instance, InterimRule


@pytest.fixture
def uniform22():
    return Instance.uniform(("a", "b"), ("c", "d"), ("k0", "k1"))


@pytest.fixture
def clash(uniform22):
    """Q1 = (1, 0), Q2 = (1, 0) on k1: type a must get k1 against d, which d never gets."""
    return InterimRule({("k1", "a"): F(1), ("k1", "b"): F(0)},
                       {("k1", "c"): F(1), ("k1", "d"): F(0)})


@pytest.fixture
def spread(uniform22):
    """Q1 = (1, 0), Q2 = (1/2, 1/2) on k1: implementable by choosing k1 iff type a."""
    return InterimRule({("k1", "a"): F(1), ("k1", "b"): F(0)},
                       {("k1", "c"): F(1, 2), ("k1", "d"): F(1, 2)})


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
