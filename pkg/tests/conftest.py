import pytest

from efog.fixtures import NAMES, load_fixture


@pytest.fixture(scope="session")
def latin():
    return load_fixture("latin")


@pytest.fixture(scope="session")
def bulgarian():
    return load_fixture("bulgarian")


@pytest.fixture(scope="session")
def universal20():
    return load_fixture("universal20")


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in NAMES}
