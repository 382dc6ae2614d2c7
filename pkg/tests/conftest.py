import pytest

from loopforge import Loop
from loopforge.catalog import build

from helpers import scalar_group_spec, theta_strict_spec, trivial_spec


@pytest.fixture(scope="session")
def loop39a():
    return build("3.9a").loop


@pytest.fixture(scope="session")
def loop32():
    return build("3.2").loop


@pytest.fixture(scope="session")
def loop31b():
    return build("3.1b").loop


@pytest.fixture(scope="session")
def trivial_loop():
    return Loop(trivial_spec())


@pytest.fixture(scope="session")
def group21_loop():
    return Loop(scalar_group_spec())


@pytest.fixture(scope="session")
def theta_strict_loop():
    return Loop(theta_strict_spec())
