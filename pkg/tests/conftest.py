import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stablab.catalog import default_catalog

settings.register_profile("stablab", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("stablab")


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def cat(catalog):
    return catalog["cat"]


@pytest.fixture(scope="session")
def ns(catalog):
    return catalog["northsouth"]


@pytest.fixture(scope="session")
def da(catalog):
    return catalog["da"]


@pytest.fixture(scope="session")
def product(catalog):
    return catalog["product"]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
