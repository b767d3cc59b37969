import os

import pytest

from monostatic.settings import RunConfig

from .helpers import egg_mesh


def pytest_collection_modifyitems(config, items):
    if os.getenv("MONOSTATIC_ACCEPTANCE") == "1":
        return
    skip = pytest.mark.skip(reason="set MONOSTATIC_ACCEPTANCE=1 to run the published-number reproductions")
    for item in items:
        if "acceptance" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def tiny_config():
    """Coarse oracle settings for fast pipeline tests."""
    return RunConfig(directions=300, knn=12, n_theta=16, n_phi=32, merge_rule="adjacent", workers=1)


@pytest.fixture(scope="session")
def egg():
    return egg_mesh()


@pytest.fixture(scope="session")
def default_config():
    """The reported oracle settings on one worker."""
    return RunConfig(directions=5000, knn=12, n_theta=100, n_phi=200, merge_rule="adjacent", workers=1)
