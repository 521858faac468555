import numpy as np
import pytest

from tollopt.simnet import desk_preset
from tollopt.tlp import ProblemSpec
from tollopt.toll import Bounds


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_desk_spec(**overrides) -> ProblemSpec:
    config = desk_preset()
    params = dict(
        config=config,
        bounds=Bounds.uniform(config.m, 1.0, 15.0),
        alpha=(1.0 - 0.0) / 3.0,
        beta=(15.0 - 0.0) / 3.0,
        replications=2,
        budget=60,
    )
    params.update(overrides)
    return ProblemSpec(**params)


@pytest.fixture
def desk_spec():
    return make_desk_spec()
