import numpy as np
import pytest

from modsym_growth.cusps import choose_truncation
from modsym_growth.symbols import build_symbol_map, builtin_level11
from modsym_growth.words import coset_table

Z0 = 2j
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def table11():
    return coset_table(11)


@pytest.fixture(scope="session")
def table1():
    return coset_table(1)


@pytest.fixture(scope="session")
def series11():
    return builtin_level11(100_000)


@pytest.fixture(scope="session")
def smap11(table11, series11):
    return build_symbol_map(table11, series11)


@pytest.fixture(scope="session")
def trunc11():
    return choose_truncation(11, Z0)


@pytest.fixture(scope="session")
def trunc1():
    return choose_truncation(1, Z0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
