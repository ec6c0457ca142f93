import functools

import pytest

from teichflow.surface import build_genus2_octagon
from teichflow.targets import HyperbolicQuotient

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def octagon(level):
    return build_genus2_octagon(level)


@functools.lru_cache(maxsize=None)
def octagon_basis(level):
    from teichflow.qdiff import hqd_basis
    mesh, g = octagon(level)
    return hqd_basis(mesh, g)


@pytest.fixture(scope="session")
def oct2():
    return octagon(2)


@pytest.fixture(scope="session")
def oct3():
    return octagon(3)


@pytest.fixture(scope="session")
def hyp():
    return HyperbolicQuotient()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
