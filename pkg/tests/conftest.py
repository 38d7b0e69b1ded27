import numpy as np
import pytest

from kdscatter.geometry import build_extreme_params, build_tortoise_map


@pytest.fixture(scope="session")
def params():
    return build_extreme_params(0.1, 1.0)


@pytest.fixture(scope="session")
def tmap(params):
    return build_tortoise_map(params)


@pytest.fixture(scope="session")
def sweep_params():
    """20 admissible parameter pairs with a*l in [0.01, 0.26]."""
    out = []
    for al in np.linspace(0.01, 0.26, 20):
        out.append(build_extreme_params(al, 1.0))
    return out
