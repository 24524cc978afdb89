import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


@pytest.fixture
def random_image(rng):
    def make(height=16, width=16):
        return rng.integers(0, 256, size=(height, width), dtype=np.uint8)

    return make
