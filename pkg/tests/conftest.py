import pytest

from biscount import ExpansionParams
from biscount.instances import complete_bipartite, even_cycle, hypercube


@pytest.fixture(scope="session")
def c8():
    return even_cycle(8)


@pytest.fixture(scope="session")
def k22():
    return complete_bipartite(2)


@pytest.fixture(scope="session")
def q3():
    return hypercube(3)


@pytest.fixture(scope="session")
def p1():
    return ExpansionParams(c1=1.0)


@pytest.fixture(scope="session")
def p100():
    return ExpansionParams()
