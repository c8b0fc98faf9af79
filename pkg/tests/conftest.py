import pytest

from dqforge import bulldozers_like


@pytest.fixture(scope="session")
def synth_10k():
    return bulldozers_like(10_000, seed=0)


@pytest.fixture(scope="session")
def synth_2k():
    return bulldozers_like(2_000, seed=5)
