import random

import pytest

from hiersfm.functions import CoverageFunction, CutFunction, ModularShift, TableFunction
from hiersfm.generate import random_coverage_spec, random_cut_spec, random_table_spec


def cut_from_spec(spec, n):
    return CutFunction(n, spec["edges"], spec["directed"])


def random_function(seed, n, kind=None, shift=True):
    """Random integer submodular oracle of the given kind (cut, coverage, table)."""
    rng = random.Random(seed)
    kind = kind or rng.choice(["cut", "coverage", "table"])
    if kind == "cut":
        f = cut_from_spec(random_cut_spec(rng, n), n)
    elif kind == "coverage":
        spec = random_coverage_spec(rng, n)
        f = CoverageFunction(spec["universe_weights"], spec["incidence"])
    else:
        return TableFunction(n, random_table_spec(rng, n)["values"])
    if shift:
        f = ModularShift(f, [rng.randint(-10, 10) for _ in range(n)])
    return f


@pytest.fixture
def unit_edge():
    return CutFunction(2, [(0, 1, 1)])


@pytest.fixture
def triangle():
    return CutFunction(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
