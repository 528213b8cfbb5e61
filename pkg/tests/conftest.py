import pytest

from prodsurf import catalog

_CACHE: dict = {}


def get_surface(catalog_id: str, **params):
    """Session-shared surface instances so chart caches persist across tests."""
    key = (catalog_id, tuple(sorted(params.items())))
    if key not in _CACHE:
        _CACHE[key] = catalog.instantiate(catalog_id, params)
    return _CACHE[key]


@pytest.fixture(scope="session")
def surface():
    return get_surface
