import pytest

from fogmig import load_preset


@pytest.fixture(scope="session")
def app1():
    return load_preset("app1")


@pytest.fixture(scope="session")
def app2():
    return load_preset("app2")


@pytest.fixture(scope="session")
def app3():
    return load_preset("app3")


@pytest.fixture(scope="session")
def tiny():
    return load_preset("tiny")
