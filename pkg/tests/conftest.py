"""Shared fixtures: seeded generators and model spaces."""

import numpy as np
import pytest

from cgmlab.core.model_spaces import anti_de_sitter3, hyperbolic_plane, sphere2, sphere3
from cgmlab.core.sampling import make_rng


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(20240607)


@pytest.fixture(params=[1.0, 2.0, 4.0, 9.0], ids=lambda c: f"c={c:g}")
def c(request) -> float:
    return request.param


@pytest.fixture
def s2():
    return sphere2(1.0)


@pytest.fixture
def h2():
    return hyperbolic_plane(1.0)


@pytest.fixture
def s3():
    return sphere3(1.0)


@pytest.fixture
def ads3():
    return anti_de_sitter3(1.0)
