import pytest
from gmpy2 import mpq
from hypothesis import strategies as st

from gwmspaces.core import Weights, e, harmonic
from gwmspaces.sampling import weight_pairs

SEED = 1729


def rationals(span=10, max_denominator=12, nonzero=False):
    s = st.fractions(min_value=-span, max_value=span, max_denominator=max_denominator)
    if nonzero:
        s = s.filter(lambda q: q != 0)
    return s.map(mpq)


def rational_lists(size, **kw):
    return st.lists(rationals(**kw), min_size=size, max_size=size)


@pytest.fixture(scope="session")
def pairs():
    return weight_pairs(SEED)


@pytest.fixture
def ee():
    return Weights(e(), e())


@pytest.fixture
def e_harm():
    return Weights(e(), harmonic())


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
