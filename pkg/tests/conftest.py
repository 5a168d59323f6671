import pytest

from wachkit.cyclo import get_context


@pytest.fixture(scope="session")
def ctx3():
    return get_context(3)


@pytest.fixture(scope="session")
def ctx5():
    return get_context(5)


@pytest.fixture(scope="session")
def ctx7():
    return get_context(7)


@pytest.fixture(scope="session")
def contexts(ctx3, ctx5, ctx7):
    return {3: ctx3, 5: ctx5, 7: ctx7}
