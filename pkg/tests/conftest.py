import itertools

import pytest
from hypothesis import strategies as st

from satadvice.cnf import CnfFormula

ACCEPTANCE_LINES = []


def record(criterion, passed, detail=""):
    ACCEPTANCE_LINES.append(f"[criterion {criterion:>2}] {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)


def all_assignments(n):
    return itertools.product((0, 1), repeat=n)


@st.composite
def formulas(draw, max_vars=8, max_clauses=12, max_width=3):
    n = draw(st.integers(1, max_vars))
    m = draw(st.integers(0, max_clauses))
    clauses = []
    for _ in range(m):
        w = draw(st.integers(1, min(max_width, n)))
        vs = draw(st.lists(st.integers(1, n), min_size=w, max_size=w, unique=True))
        signs = draw(st.lists(st.sampled_from((-1, 1)), min_size=w, max_size=w))
        clauses.append(tuple(v * s for v, s in zip(vs, signs)))
    return CnfFormula.from_clauses(clauses, n)


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)
