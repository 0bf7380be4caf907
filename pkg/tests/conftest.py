import pytest

from soergeldg import coxeter


@pytest.fixture(scope="session")
def A2():
    return coxeter.load_realization("A2")


@pytest.fixture(scope="session")
def B2():
    return coxeter.load_realization("B2")


@pytest.fixture(scope="session")
def A1xA1():
    return coxeter.load_realization("A1xA1")


@pytest.fixture(scope="session")
def A1xA2():
    return coxeter.load_realization("A1xA2")


@pytest.fixture(scope="session")
def A3():
    return coxeter.load_realization("A3")
