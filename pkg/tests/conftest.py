import pytest

from hcmdesign.catalog import builtin_catalog


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


@pytest.fixture(scope="session")
def carbonfish(catalog):
    p = catalog.preset("carbonfish")
    return p.geometry, catalog.material(p.material), catalog.servo(p.servo)


@pytest.fixture(scope="session")
def coral(catalog):
    p = catalog.preset("coral")
    return p.geometry, catalog.material(p.material), catalog.servo(p.servo)
