import pytest

from entwit import choi_witness, swap_witness


@pytest.fixture(scope="session")
def choi():
    return choi_witness()


@pytest.fixture(scope="session")
def swap():
    return swap_witness()
