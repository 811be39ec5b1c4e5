from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import pytest

from randassign.core import PreferenceProfile, RandomAssignment

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"


def frac_matrix(rows, denom):
    return RandomAssignment(tuple(tuple(Fraction(x, denom) for x in r) for r in rows))


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def ex1_profile():
    return PreferenceProfile.from_lists([[0, 1, 2, 3], [0, 1, 2, 3], [1, 0, 3, 2], [1, 0, 3, 2]])


@pytest.fixture
def ex1_p():
    return frac_matrix([[5, 1, 5, 1], [5, 1, 5, 1], [1, 5, 1, 5], [1, 5, 1, 5]], 12)


@pytest.fixture
def ex1_q():
    return frac_matrix([[1, 5, 1, 5], [1, 5, 1, 5], [5, 1, 5, 1], [5, 1, 5, 1]], 12)


@pytest.fixture
def ex3_p():
    return frac_matrix([[1, 1, 1, 0], [1, 1, 0, 1], [1, 0, 2, 0], [0, 1, 0, 2]], 3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
