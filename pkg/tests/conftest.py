import pytest

from arrowplace.geom import get_eps_scale, set_eps_scale


@pytest.fixture(autouse=True)
def _restore_eps():
    saved = get_eps_scale()
    yield
    set_eps_scale(saved)
