import pytest

from ra_ddp import fixtures
from ra_ddp.solver import ddp_solve


@pytest.fixture(scope="session")
def line5():
    return fixtures.game("line5")


@pytest.fixture(scope="session")
def gap9():
    return fixtures.game("gap9")


@pytest.fixture(scope="session")
def gap9w():
    return fixtures.game("gap9w")


@pytest.fixture(scope="session")
def int3():
    return fixtures.game("int3")


@pytest.fixture(scope="session")
def line5_sol(line5):
    return ddp_solve(line5)


@pytest.fixture(scope="session")
def gap9w_sol(gap9w):
    return ddp_solve(gap9w)
